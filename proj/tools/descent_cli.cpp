// Command-line surface for the powered-descent trajectory and engine
// sizing toolkit: inner solves, Pareto sweeps, oracle checks and plots.

#include "descent/csv_io.hpp"
#include "descent/oracle_verification.hpp"
#include "descent/pareto_outer.hpp"
#include "descent/plots.hpp"
#include "descent/run_config.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitIo = 3;

struct GlobalOptions {
    std::string config_path = "default";
    std::string out_dir;
    bool planar = false;
    int nodes = 0;
    int parallel = 1;
};

descent::RunConfig load(const GlobalOptions& opts) {
    descent::RunConfig cfg = descent::load_config_file(opts.config_path);
    if (opts.planar) {
        cfg.scenario.planar_mode = true;
        cfg.scenario.phi0_free = false;
        cfg.scenario.phi0 = 0.0;
        cfg.scenario.phi_f = 0.0;
        cfg.scenario.v0 = 0.0;
    }
    if (opts.nodes > 0) cfg.scenario.nodes = opts.nodes;
    if (!opts.out_dir.empty()) cfg.output.directory = opts.out_dir;
    return cfg;
}

void print_report(const descent::TrajectorySolution& sol) {
    std::cout << "status=" << descent::to_string(sol.status) << "\n"
              << "iterations=" << sol.iterations << "\n"
              << "t_f_s=" << descent::format_sig9(sol.t_f) << "\n"
              << "final_mass_kg=" << descent::format_sig9(sol.final_mass) << "\n"
              << "max_defect=" << descent::format_sig9(sol.max_defect) << "\n";
}

void print_oracle(const descent::OracleReport& rep) {
    std::cout << "oracle_pass=" << (rep.pass ? 1 : 0) << "\n"
              << "oracle_aborted=" << (rep.propagation_aborted ? 1 : 0) << "\n";
    if (rep.propagation_aborted) {
        std::cout << "oracle_abort_time_s=" << descent::format_sig9(rep.abort_time) << "\n"
                  << "oracle_abort_reason=" << rep.message << "\n";
        return;
    }
    std::cout << "oracle_err_altitude_m=" << descent::format_sig9(rep.err_altitude_m) << "\n"
              << "oracle_err_downrange_m=" << descent::format_sig9(rep.err_downrange_m) << "\n"
              << "oracle_err_w_ms=" << descent::format_sig9(rep.err_w_ms) << "\n"
              << "oracle_err_u_ms=" << descent::format_sig9(rep.err_u_ms) << "\n"
              << "oracle_err_v_ms=" << descent::format_sig9(rep.err_v_ms) << "\n"
              << "oracle_propellant_diff_kg=" << descent::format_sig9(rep.propellant_diff_kg)
              << "\n";
}

int run_solve(const GlobalOptions& opts) {
    const descent::RunConfig cfg = load(opts);
    const auto engine = cfg.engine.resolve();
    const auto problem = descent::transcribe(cfg.scenario, engine, cfg.constants);
    if (problem.low_thrust_warning) {
        std::cerr << "warning: T_max/m0 below local gravity; scenario likely infeasible\n";
    }
    const auto sol = descent::solve_trajectory(problem, cfg.solver);
    std::filesystem::create_directories(cfg.output.directory);
    descent::write_trajectory(sol, cfg.constants, cfg.output.directory + "/trajectory.csv");
    print_report(sol);
    if (cfg.output.plots) {
        const auto table = descent::make_trajectory_table(sol, cfg.constants);
        descent::emit_plots(&table, nullptr, cfg.constants.radius, cfg.output.directory);
    }
    return sol.status == descent::SolverStatus::Converged ? kExitOk : kExitNoConvergence;
}

int run_sweep(const GlobalOptions& opts, descent::SweepMode mode) {
    const descent::RunConfig cfg = load(opts);
    auto spec = cfg.make_sweep_spec(mode, opts.parallel);
    descent::ParetoResult result = descent::sweep(spec);
    if (mode == descent::SweepMode::MaxThrust && !result.boundary_maximizer &&
        cfg.sweep.refine_iterations > 0) {
        result = descent::refine_maximum(result, spec, cfg.sweep.refine_iterations);
    }
    std::filesystem::create_directories(cfg.output.directory);
    const std::string name =
        mode == descent::SweepMode::MaxThrust ? "pareto.csv" : "pareto_engines.csv";
    descent::write_text_file(cfg.output.directory + "/" + name,
                             descent::pareto_to_csv(result));
    if (cfg.output.plots) {
        descent::emit_plots(nullptr, &result, cfg.constants.radius, cfg.output.directory);
    }
    const auto* best = result.maximizer();
    std::cout << "points=" << result.points.size() << "\n"
              << "maximizer_t_max_N=" << descent::format_sig9(best->t_max) << "\n"
              << "maximizer_n=" << best->n << "\n"
              << "maximizer_thrust_to_mass0_ms2="
              << descent::format_sig9(best->thrust_to_mass0) << "\n"
              << "maximizer_effective_payload_kg="
              << descent::format_sig9(best->effective_payload) << "\n"
              << "boundary_maximizer=" << (result.boundary_maximizer ? 1 : 0) << "\n"
              << "neighbor_failure=" << (result.neighbor_failure ? 1 : 0) << "\n";
    return kExitOk;
}

int run_propagate(const GlobalOptions& opts, const std::string& csv_path) {
    const descent::RunConfig cfg = load(opts);
    const auto table = descent::read_trajectory(csv_path);
    const auto sol = descent::solution_from_table(table);
    const auto schedule = descent::interpolate_controls(sol);
    const auto engine = cfg.engine.resolve();
    descent::StepControl sc = descent::StepControl::adaptive(1e-10, 1e-10);
    sc.check_surface = false;
    const auto traj = descent::propagate(sol.states.front(), schedule, engine.isp,
                                         cfg.constants, sol.t_f, sc);
    descent::TrajectorySolution out;
    for (const auto& ts : traj) {
        out.times.push_back(ts.t);
        out.states.push_back(ts.state);
        out.controls.push_back(schedule(ts.t));
    }
    out.t_f = sol.t_f;
    out.final_mass = traj.back().state.m;
    std::filesystem::create_directories(cfg.output.directory);
    descent::write_trajectory(out, cfg.constants, cfg.output.directory + "/propagated.csv");
    const auto& end = traj.back().state;
    std::cout << "t_end_s=" << descent::format_sig9(traj.back().t) << "\n"
              << "alt_end_m=" << descent::format_sig9(end.r - cfg.constants.radius) << "\n"
              << "w_end_ms=" << descent::format_sig9(end.w) << "\n"
              << "u_end_ms=" << descent::format_sig9(end.u) << "\n"
              << "v_end_ms=" << descent::format_sig9(end.v) << "\n"
              << "m_end_kg=" << descent::format_sig9(end.m) << "\n";
    return kExitOk;
}

int run_check(const GlobalOptions& opts, const std::string& csv_path) {
    const descent::RunConfig cfg = load(opts);
    const auto engine = cfg.engine.resolve();
    const auto problem = descent::transcribe(cfg.scenario, engine, cfg.constants);

    const auto nlp = problem.to_nlp();
    const auto guess = descent::initial_guess(problem);
    const auto grad = descent::check_gradients(nlp, guess);
    std::cout << "gradient_check_objective_max_rel="
              << descent::format_sig9(grad.objective_max_rel) << "\n"
              << "gradient_check_jacobian_max_rel="
              << descent::format_sig9(grad.jacobian_max_rel) << "\n";

    descent::TrajectorySolution sol;
    if (!csv_path.empty()) {
        sol = descent::solution_from_table(descent::read_trajectory(csv_path));
        if (static_cast<int>(sol.states.size()) != problem.nodes) {
            std::cerr << "error: stored solution has " << sol.states.size()
                      << " nodes, config expects " << problem.nodes << "\n";
            return kExitValidation;
        }
        const auto z = problem.pack(sol.states, sol.controls, sol.t_f);
        const auto d = problem.defects(z);
        sol.max_defect = d.lpNorm<Eigen::Infinity>();
        sol.scheme = cfg.scenario.scheme;
    } else {
        sol = descent::solve_trajectory(problem, cfg.solver);
        print_report(sol);
        if (sol.status != descent::SolverStatus::Converged) return kExitNoConvergence;
    }
    std::cout << "max_defect=" << descent::format_sig9(sol.max_defect) << "\n";
    const auto rep = descent::verify_solution(sol, cfg.scenario, engine, cfg.constants);
    print_oracle(rep);
    return rep.pass ? kExitOk : kExitNoConvergence;
}

int run_plot(const GlobalOptions& opts, const std::vector<std::string>& csvs) {
    const descent::RunConfig cfg = load(opts);
    for (const auto& path : csvs) {
        const std::string text = descent::read_text_file(path);
        if (text.rfind("t_max_N,", 0) == 0) {
            const auto result = descent::pareto_from_csv(text);
            descent::emit_plots(nullptr, &result, cfg.constants.radius,
                                cfg.output.directory);
        } else {
            const auto table = descent::read_trajectory(path);
            descent::emit_plots(&table, nullptr, cfg.constants.radius,
                                cfg.output.directory);
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Powered lunar descent trajectory optimization and Pareto engine sizing"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions opts;
    app.add_option("--config", opts.config_path,
                   "Configuration file path ('default' for built-in defaults)");
    app.add_option("--out", opts.out_dir, "Output directory (overrides [output])");
    app.add_flag("--planar", opts.planar, "Force the planar (equatorial 2D) scenario");
    app.add_option("--nodes", opts.nodes, "Override collocation node count");
    app.add_option("--parallel", opts.parallel, "Concurrent inner solves for sweeps")
        ->check(CLI::PositiveNumber);

    auto* solve_cmd = app.add_subcommand("solve", "Solve one inner minimum-fuel problem");
    auto* pareto_cmd =
        app.add_subcommand("pareto", "Case 2 max-thrust sweep with refinement");
    auto* engines_cmd = app.add_subcommand("engines", "Case 1 engine-count sweep");
    std::string propagate_csv;
    auto* propagate_cmd =
        app.add_subcommand("propagate", "Oracle propagation of a stored solution");
    propagate_cmd->add_option("csv", propagate_csv, "Trajectory CSV")->required();
    std::string check_csv;
    auto* check_cmd =
        app.add_subcommand("check", "Gradient, defect and oracle verification");
    check_cmd->add_option("csv", check_csv, "Trajectory CSV (optional; else solve first)");
    std::vector<std::string> plot_csvs;
    auto* plot_cmd = app.add_subcommand("plot", "Re-render plots from CSV files");
    plot_cmd->add_option("csv", plot_csvs, "Trajectory or Pareto CSV files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (solve_cmd->parsed()) return run_solve(opts);
        if (pareto_cmd->parsed()) return run_sweep(opts, descent::SweepMode::MaxThrust);
        if (engines_cmd->parsed()) return run_sweep(opts, descent::SweepMode::EngineCount);
        if (propagate_cmd->parsed()) return run_propagate(opts, propagate_csv);
        if (check_cmd->parsed()) return run_check(opts, check_csv);
        if (plot_cmd->parsed()) return run_plot(opts, plot_csvs);
    } catch (const descent::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const descent::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const descent::PropagationError& e) {
        std::cerr << "propagation aborted at t=" << e.time << ": " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    }
    return kExitValidation;
}
