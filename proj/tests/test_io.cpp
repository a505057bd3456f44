#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "descent/csv_io.hpp"
#include "descent/plots.hpp"
#include "descent/run_config.hpp"

#include <cmath>
#include <filesystem>
#include <random>

using namespace descent;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

TrajectorySolution sample_solution(int nodes = 12) {
    TrajectorySolution sol;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> un(0.0, 1.0);
    const MoonConstants c;
    for (int k = 0; k < nodes; ++k) {
        sol.times.push_back(10.0 * k + un(rng));
        LanderState s;
        s.r = c.radius + 30000.0 - 2400.0 * k;
        s.theta = 0.01 * k;
        s.phi = 0.001 * k;
        s.w = -30.0 + un(rng);
        s.u = 1688.0 - 140.0 * k;
        s.v = un(rng);
        s.m = 4000.0 - 100.0 * k;
        sol.states.push_back(s);
        sol.controls.push_back(ThrustCommand{12000.0 * un(rng), 3.0 * un(rng), un(rng)});
    }
    sol.t_f = sol.times.back();
    sol.final_mass = sol.states.back().m;
    sol.status = SolverStatus::Converged;
    return sol;
}

}  // namespace

TEST_CASE("nine-significant-digit formatting") {
    CHECK(format_sig9(0.0) == "0");
    CHECK(format_sig9(1688.0) == "1688");
    CHECK(format_sig9(1.23456789012345) == "1.23456789");
    CHECK(format_sig9(-2.5e-7) == "-2.5e-07");
}

TEST_CASE("trajectory csv round trip") {
    const MoonConstants c;
    const auto sol = sample_solution();
    const std::string path = temp_path("traj_roundtrip.csv");
    write_trajectory(sol, c, path);

    const std::string text = read_text_file(path);
    CHECK(text.rfind("t_s,r_m,alt_m,theta_rad,phi_rad,w_ms,u_ms,v_ms,m_kg,"
                     "T_N,alpha_rad,beta_rad",
                     0) == 0);

    const auto table = read_trajectory(path);
    REQUIRE(table.size() == sol.states.size());
    const auto back = solution_from_table(table);
    for (size_t k = 0; k < sol.states.size(); ++k) {
        CHECK(back.times[k] == doctest::Approx(sol.times[k]).epsilon(1e-8));
        CHECK(back.states[k].r == doctest::Approx(sol.states[k].r).epsilon(1e-8));
        CHECK(back.states[k].m == doctest::Approx(sol.states[k].m).epsilon(1e-8));
        CHECK(back.controls[k].T == doctest::Approx(sol.controls[k].T).epsilon(1e-8));
    }
    // altitude column is radius-consistent
    for (size_t k = 0; k < table.size(); ++k) {
        CHECK(table.r_m[k] - table.alt_m[k] == doctest::Approx(c.radius).epsilon(1e-9));
    }
    std::filesystem::remove(path);
}

TEST_CASE("csv writes are byte-identical across repeats") {
    const MoonConstants c;
    const auto sol = sample_solution();
    const std::string p1 = temp_path("traj_a.csv"), p2 = temp_path("traj_b.csv");
    write_trajectory(sol, c, p1);
    write_trajectory(sol, c, p2);
    CHECK(read_text_file(p1) == read_text_file(p2));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("malformed csv errors carry line numbers") {
    const std::string path = temp_path("bad.csv");

    write_text_file(path, "wrong,header\n1,2\n");
    CHECK_THROWS_AS(read_trajectory(path), IoError);

    write_text_file(path,
                    "t_s,r_m,alt_m,theta_rad,phi_rad,w_ms,u_ms,v_ms,m_kg,T_N,alpha_rad,beta_rad\n"
                    "0,1.74e6,800,0,0,0,0,0,4000,0,0,0\n"
                    "1,1.74e6,800,0,0,0,0,0,bogus,0,0,0\n");
    try {
        read_trajectory(path);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }

    // non-increasing time
    write_text_file(path,
                    "t_s,r_m,alt_m,theta_rad,phi_rad,w_ms,u_ms,v_ms,m_kg,T_N,alpha_rad,beta_rad\n"
                    "5,1.74e6,800,0,0,0,0,0,4000,0,0,0\n"
                    "5,1.74e6,800,0,0,0,0,0,3999,0,0,0\n");
    CHECK_THROWS_AS(read_trajectory(path), IoError);
    std::filesystem::remove(path);
}

TEST_CASE("missing file raises an io error") {
    CHECK_THROWS_AS(read_text_file(temp_path("no_such_file_here.csv")), IoError);
    CHECK_THROWS_AS(read_trajectory(temp_path("no_such_file_here.csv")), IoError);
}

TEST_CASE("empty config text yields the documented defaults") {
    const auto cfg = load_config("");
    const MoonConstants c;
    CHECK(cfg.constants.mu == c.mu);
    CHECK(cfg.constants.radius == c.radius);
    CHECK(cfg.scenario.m0 == 4000.0);
    CHECK(cfg.scenario.r0 == doctest::Approx(c.radius + 30000.0));
    CHECK(cfg.scenario.r_f == doctest::Approx(c.radius + 800.0));
    CHECK(cfg.scenario.u0 == 1688.0);
    CHECK(cfg.scenario.nodes == 60);
    CHECK(cfg.engine.engine_case == 2);
    CHECK(cfg.engine.t_max == 12000.0);
    CHECK(cfg.sweep.t_start == 4000.0);
    CHECK(cfg.sweep.t_stop == 32000.0);
    CHECK(cfg.sweep.t_step == 2000.0);
    CHECK(cfg.sweep.n_start == 5);
    CHECK(cfg.sweep.n_stop == 30);
    CHECK(cfg.solver.constraint_tol == 1e-6);
}

TEST_CASE("the spelled-out default document parses to the defaults") {
    const auto a = load_config("");
    const auto b = load_config(default_config_text());
    CHECK(a.scenario.r0 == b.scenario.r0);
    CHECK(a.scenario.u0 == b.scenario.u0);
    CHECK(a.engine.t_max == b.engine.t_max);
    CHECK(a.solver.penalty_max == b.solver.penalty_max);
    CHECK(a.sweep.refine_iterations == b.sweep.refine_iterations);
    CHECK(a.output.directory == b.output.directory);
}

TEST_CASE("config parsing is deterministic") {
    const std::string text = "[scenario]\nnodes = 45\nu0 = 1700\n[engine]\ncase = 2\nt_max = 9000\n";
    const auto a = load_config(text);
    const auto b = load_config(text);
    CHECK(a.scenario.nodes == b.scenario.nodes);
    CHECK(a.engine.t_max == b.engine.t_max);
    CHECK(a.scenario.nodes == 45);
    CHECK(a.engine.t_max == 9000.0);
}

TEST_CASE("unknown keys and sections are rejected with line info") {
    try {
        load_config("[scenario]\nnodez = 60\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("nodez") != std::string::npos);
        CHECK(msg.find("2") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config("[scenari]\nnodes = 60\n"), ConfigError);
    CHECK_THROWS_AS(load_config("nodes = 60\n"), ConfigError);          // key before section
    CHECK_THROWS_AS(load_config("[scenario]\nnodes 60\n"), ConfigError);  // missing '='
    CHECK_THROWS_AS(load_config("[scenario]\nnodes = 60\nnodes = 70\n"), ConfigError);
    CHECK_THROWS_AS(load_config("[scenario]\nnodes = sixty\n"), ConfigError);
}

TEST_CASE("engine case exclusivity") {
    CHECK_NOTHROW(load_config("[engine]\ncase = 1\nn = 10\n"));
    CHECK_NOTHROW(load_config("[engine]\ncase = 2\nt_max = 9000\n"));
    CHECK_THROWS_AS(load_config("[engine]\ncase = 1\nt_max = 9000\n"), ConfigError);
    CHECK_THROWS_AS(load_config("[engine]\ncase = 2\nn = 10\n"), ConfigError);
    CHECK_THROWS_AS(load_config("[engine]\ncase = 3\n"), ConfigError);
}

TEST_CASE("config-level scenario validation failures become config errors") {
    CHECK_THROWS_AS(load_config("[scenario]\nfinal_altitude = 40000\n"), ConfigError);
    CHECK_THROWS_AS(load_config("[scenario]\nnodes = 4\n"), ConfigError);
}

TEST_CASE("load_config_file treats 'default' as the built-ins") {
    const auto a = load_config_file("default");
    const auto b = load_config_file("");
    CHECK(a.scenario.r0 == b.scenario.r0);
    CHECK_THROWS_AS(load_config_file(temp_path("missing_config.ini")), IoError);
}

TEST_CASE("sweep spec assembly from a config") {
    const auto cfg = load_config("[sweep]\nt_start = 6000\nt_stop = 10000\nt_step = 2000\n");
    const auto spec = cfg.make_sweep_spec(SweepMode::MaxThrust, 3);
    REQUIRE(spec.thrust_grid.size() == 3);
    CHECK(spec.thrust_grid.front() == 6000.0);
    CHECK(spec.thrust_grid.back() == 10000.0);
    CHECK(spec.parallelism == 3);

    const auto cspec = cfg.make_sweep_spec(SweepMode::EngineCount, 1);
    REQUIRE(cspec.count_grid.size() == 26);
    CHECK(cspec.count_grid.front() == 5);
    CHECK(cspec.count_grid.back() == 30);
}

TEST_CASE("svg rendering is deterministic and self-contained") {
    std::vector<double> xs{0.0, 1.0, 2.0, 3.0}, ys{1.0, 3.0, 2.0, 5.0};
    const auto a = render_line_plot("demo", "x", "y", xs, ys, 3);
    const auto b = render_line_plot("demo", "x", "y", xs, ys, 3);
    CHECK(a == b);
    CHECK(a.rfind("<svg", 0) == 0);
    CHECK(a.find("</svg>") != std::string::npos);
    CHECK(a.find("max") != std::string::npos);  // marker annotation
    CHECK_THROWS_AS(render_line_plot("demo", "x", "y", {}, {}), std::invalid_argument);
    CHECK_THROWS_AS(render_line_plot("demo", "x", "y", xs, {1.0}), std::invalid_argument);
    // single point and constant series degenerate gracefully
    CHECK_NOTHROW(render_line_plot("demo", "x", "y", {1.0}, {2.0}));
    CHECK_NOTHROW(render_line_plot("demo", "x", "y", xs, {2.0, 2.0, 2.0, 2.0}));
}

TEST_CASE("downrange follows the initial horizontal velocity direction") {
    const MoonConstants c;
    TrajectoryTable t;
    const int n = 5;
    for (int k = 0; k < n; ++k) {
        t.t_s.push_back(k);
        t.r_m.push_back(c.radius + 1000.0);
        t.alt_m.push_back(1000.0);
        t.theta_rad.push_back(1e-5 * k);  // eastward motion only
        t.phi_rad.push_back(0.0);
        t.w_ms.push_back(0.0);
        t.u_ms.push_back(100.0);
        t.v_ms.push_back(0.0);
        t.m_kg.push_back(4000.0);
        t.T_N.push_back(0.0);
        t.alpha_rad.push_back(0.0);
        t.beta_rad.push_back(0.0);
    }
    std::vector<double> down, cross;
    downrange_crossrange(t, c.radius, down, cross);
    CHECK(down.front() == 0.0);
    CHECK(down.back() == doctest::Approx(c.radius * 1e-5 * (n - 1)).epsilon(1e-12));
    for (double x : cross) CHECK(x == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("emit_plots writes one file per figure") {
    const MoonConstants c;
    const auto sol = sample_solution();
    const auto table = make_trajectory_table(sol, c);

    SweepSpec spec;
    spec.thrust_grid = SweepSpec::linear_grid(4000.0, 12000.0, 2000.0);
    auto inner = [](const EngineCharacterization& eng, const Vector*) {
        InnerSolveOutcome out;
        out.final_mass = 2300.0 - 4.0e9 / (eng.max_thrust * eng.max_thrust);
        out.status = SolverStatus::Converged;
        return out;
    };
    const auto pareto = sweep(spec, inner);

    const std::string dir = temp_path("plots_out");
    std::filesystem::remove_all(dir);
    const auto written = emit_plots(&table, &pareto, c.radius, dir);
    CHECK(written.size() == 7);
    for (const auto& p : written) {
        CHECK(std::filesystem::file_size(p) > 200);
        const auto svg = read_text_file(p);
        CHECK(svg.rfind("<svg", 0) == 0);
    }
    CHECK_THROWS_AS(emit_plots(nullptr, nullptr, c.radius, dir), std::invalid_argument);
    std::filesystem::remove_all(dir);
}
