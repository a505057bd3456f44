// Acceptance gate: one pass/fail line per criterion, nonzero exit when any
// criterion fails.

#include "descent/csv_io.hpp"
#include "descent/engine_models.hpp"
#include "descent/moon_dynamics.hpp"
#include "descent/nlp_core.hpp"
#include "descent/oracle_verification.hpp"
#include "descent/pareto_outer.hpp"
#include "descent/transcription.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

using namespace descent;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& label, const std::string& detail) {
    std::printf("ACCEPTANCE %d [%s]: %s  (%s)\n", criterion, pass ? "PASS" : "FAIL",
                label.c_str(), detail.c_str());
    if (!pass) ++failures;
}

double wall_seconds(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void criterion_1() {
    QuadraticEngineModel q;
    const double m = engine_mass(q, 900.0);
    const double isp = engine_isp(q, 900.0);
    const bool pass = m >= 7.76 && m <= 8.24 && isp >= 308.5 && isp <= 311.5;
    std::ostringstream d;
    d << "mass(900 N) = " << m << " kg, isp(900 N) = " << isp << " s";
    report(1, pass, "engine curve fits near the 900 N reference engine", d.str());
}

void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    ScenarioSpec scn;
    scn.planar_mode = true;
    scn.phi0_free = false;
    scn.nodes = 60;
    const EngineCharacterization eng{12000.0, 305.0, 67.4};
    const MoonConstants consts;
    const auto p = transcribe(scn, eng, consts);
    const auto sol = solve_trajectory(p, SolverConfig{});
    const double elapsed = wall_seconds(t0);

    const auto& end = sol.states.back();
    const double alt_err = std::abs(end.r - scn.r_f);
    const auto oracle = verify_solution(sol, scn, eng, p.consts);
    const double span = scn.r0 - scn.r_f;

    const bool pass = sol.status == SolverStatus::Converged && sol.max_defect <= 1e-6 &&
                      std::abs(end.w) < 0.01 && std::abs(end.u) < 0.01 &&
                      std::abs(end.v) < 0.01 && alt_err <= 1.0 &&
                      oracle.err_altitude_m < 1e-3 * span && elapsed < 30.0;
    std::ostringstream d;
    d << to_string(sol.status) << ", defect " << sol.max_defect << ", |w,u,v| = ("
      << std::abs(end.w) << ", " << std::abs(end.u) << ", " << std::abs(end.v)
      << ") m/s, altitude err " << alt_err << " m, re-propagated altitude err "
      << oracle.err_altitude_m << " m, " << elapsed << " s";
    report(2, pass, "planar reference descent lands softly at 800 m", d.str());
}

void criterion_3() {
    MoonConstants c;
    c.mu = 1.62 * c.radius * c.radius;
    c.flat_gravity = true;
    c.omega = 0.0;

    ScenarioSpec scn;
    scn.planar_mode = true;
    scn.phi0_free = false;
    scn.theta0_free = false;
    scn.u0 = 0.0;
    scn.r0 = c.radius + 2800.0;
    scn.r_f = c.radius + 800.0;
    scn.nodes = 120;
    const EngineCharacterization eng{12000.0, 305.0, 1.0};
    const auto p = transcribe(scn, eng, c);
    const auto sol = solve_trajectory(p, SolverConfig{});
    const double prop = scn.m0 - sol.final_mass;

    VerticalScenario vs;  // 2 km drop, 12 kN, isp 305, m0 4000, g 1.62
    const auto bb = solve_vertical_bangbang(vs);
    const double rel = std::abs(prop - bb.propellant) / bb.propellant;

    const bool pass = sol.status == SolverStatus::Converged && rel < 0.01;
    std::ostringstream d;
    d << to_string(sol.status) << ", propellant " << prop << " kg vs closed form "
      << bb.propellant << " kg (" << 100.0 * rel << "%)";
    report(3, pass, "vertical descent matches the bang-bang solution", d.str());
}

ParetoResult thrust_sweep_result;
SweepSpec thrust_sweep_spec;

void criterion_4() {
    SweepSpec spec;
    spec.mode = SweepMode::MaxThrust;
    spec.thrust_grid = SweepSpec::linear_grid(4000.0, 32000.0, 2000.0);
    spec.scenario.nodes = 40;
    spec.parallelism = 4;
    spec.solver.max_outer_iterations = 120;
    const auto res = sweep(spec);
    thrust_sweep_result = res;
    thrust_sweep_spec = spec;

    auto mass_at = [&](double t) {
        for (const auto& pt : res.points) {
            if (pt.t_max == t) return pt.final_mass;
        }
        return 0.0;
    };
    // non-decreasing across converged points, 0.2 kg deadband
    bool monotone = true;
    double worst_drop = 0.0, worst_at = 0.0;
    const ParetoPoint* prev = nullptr;
    for (const auto& pt : res.points) {
        if (pt.status != SolverStatus::Converged) continue;
        if (prev != nullptr) {
            const double drop = prev->final_mass - pt.final_mass;
            if (drop > worst_drop) {
                worst_drop = drop;
                worst_at = pt.t_max;
            }
            if (drop > 0.2) monotone = false;
        }
        prev = &pt;
    }
    const double low_gain = mass_at(12000.0) - mass_at(4000.0);
    const double high_gain = mass_at(32000.0) - mass_at(24000.0);
    const bool flattens = high_gain < 0.2 * low_gain;

    const bool pass = monotone && flattens;
    std::ostringstream d;
    d << "final mass " << mass_at(4000.0) << " -> " << mass_at(32000.0)
      << " kg, gain 4->12 kN " << low_gain << " kg, 24->32 kN " << high_gain
      << " kg, largest step drop " << worst_drop << " kg at " << worst_at << " N";
    report(4, pass, "final mass grows with max thrust and saturates", d.str());
}

void criterion_5() {
    const auto& res = thrust_sweep_result;
    bool ok = res.maximizer_index >= 0 && !res.boundary_maximizer;
    std::ostringstream d;
    if (!ok) {
        d << "no interior maximizer";
        report(5, false, "payload peaks at an intermediate thrust", d.str());
        return;
    }
    const auto& peak = res.points[res.maximizer_index];
    const bool rise = peak.effective_payload > res.points.front().effective_payload + 0.1;
    const bool fall = peak.effective_payload > res.points.back().effective_payload + 0.1;
    const bool window = peak.thrust_to_mass0 >= 2.0 && peak.thrust_to_mass0 <= 4.5;

    const auto fine = refine_maximum(res, thrust_sweep_spec, 30);
    const auto* ref = fine.maximizer();
    const double spacing = 2000.0;
    const bool refined = ref != nullptr && std::abs(ref->t_max - peak.t_max) <= spacing &&
                         ref->effective_payload >= peak.effective_payload - 1e-9 &&
                         ref->thrust_to_mass0 >= 2.0 && ref->thrust_to_mass0 <= 4.5;

    const bool pass = rise && fall && window && refined;
    d << "peak " << peak.effective_payload << " kg at " << peak.t_max << " N ("
      << peak.thrust_to_mass0 << " m/s^2), refined to " << (ref ? ref->t_max : 0.0)
      << " N, edges " << res.points.front().effective_payload << " / "
      << res.points.back().effective_payload << " kg";
    report(5, pass, "payload peaks at an intermediate thrust", d.str());
}

void criterion_6() {
    SweepSpec spec;
    spec.mode = SweepMode::EngineCount;
    for (int n = 5; n <= 30; ++n) spec.count_grid.push_back(n);
    spec.scenario.nodes = 40;
    spec.parallelism = 4;
    spec.solver.max_outer_iterations = 120;
    const auto res = sweep(spec);

    bool ok = res.maximizer_index >= 0 && !res.boundary_maximizer;
    std::ostringstream d;
    if (!ok) {
        d << "no interior maximizer";
        report(6, false, "engine-count sweep has an interior optimum", d.str());
        return;
    }
    const auto& peak = res.points[res.maximizer_index];
    const bool window = peak.thrust_to_mass0 >= 2.0 && peak.thrust_to_mass0 <= 4.5;
    const bool pass = window;
    d << "n* = " << peak.n << " (" << peak.thrust_to_mass0 << " m/s^2), payload "
      << peak.effective_payload << " kg";
    report(6, pass, "engine-count sweep has an interior optimum", d.str());
}

bool property_energy() {
    MoonConstants c;
    c.omega = 0.0;
    LanderState s;
    s.r = c.radius + 80e3;
    s.u = std::sqrt(c.mu / s.r);
    s.w = 50.0;
    s.v = 100.0;
    s.m = 4000.0;
    auto energy = [&](const LanderState& st) {
        return 0.5 * (st.w * st.w + st.u * st.u + st.v * st.v) - c.mu / st.r;
    };
    const auto traj = propagate(
        s, [](double) { return ThrustCommand{}; }, 310.0, c, 1500.0,
        StepControl::adaptive(1e-10, 1e-10));
    const double e0 = energy(s);
    for (const auto& ts : traj) {
        if (std::abs(energy(ts.state) - e0) / std::abs(e0) > 1e-8) return false;
    }
    return true;
}

bool property_jacobian() {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> alt(1e3, 100e3), ang(-0.8, 0.8),
        vel(-1800.0, 1800.0), mass(500.0, 4000.0), thrust(0.0, 12000.0),
        alpha(-M_PI, M_PI), beta(-1.2, 1.2);
    const MoonConstants c;
    for (int i = 0; i < 100; ++i) {
        LanderState s{c.radius + alt(rng), ang(rng), 0.9 * ang(rng), 0.1 * vel(rng),
                      vel(rng), 0.1 * vel(rng), mass(rng)};
        ThrustCommand cmd{thrust(rng), alpha(rng), beta(rng)};
        const auto Ja = dynamics_jacobian(s, cmd, 310.0, c);
        Eigen::Matrix<double, 10, 1> x;
        x << s.r, s.theta, s.phi, s.w, s.u, s.v, s.m, cmd.T, cmd.alpha, cmd.beta;
        for (int j = 0; j < 10; ++j) {
            const double h = 1e-6 * (1.0 + std::abs(x(j)));
            auto eval = [&](double xj) {
                auto xp = x;
                xp(j) = xj;
                LanderState sp{xp(0), xp(1), xp(2), xp(3), xp(4), xp(5), xp(6)};
                return state_derivative(sp, ThrustCommand{xp(7), xp(8), xp(9)}, 310.0, c)
                    .to_vector();
            };
            const auto col = (eval(x(j) + h) - eval(x(j) - h)) / (2.0 * h);
            for (int r = 0; r < 7; ++r) {
                const double denom = std::max({1.0, std::abs(Ja(r, j)), std::abs(col(r))});
                if (std::abs(Ja(r, j) - col(r)) / denom > 1e-4) return false;
            }
        }
    }
    return true;
}

bool property_defect_order(std::string& detail) {
    const EngineCharacterization eng{12000.0, 305.0, 67.4};
    auto ctrl = [](double) { return ThrustCommand{8000.0, M_PI, 0.15}; };
    const double t_f = 120.0;
    auto sc = StepControl::adaptive(1e-12, 1e-12);
    sc.check_surface = false;
    std::ostringstream d;
    bool pass = true;
    for (auto scheme : {CollocationScheme::Trapezoidal, CollocationScheme::HermiteSimpson}) {
        std::vector<double> hs, errs;
        for (int nodes : {15, 29, 57}) {
            ScenarioSpec scn;
            scn.nodes = nodes;
            scn.scheme = scheme;
            const auto p = transcribe(scn, eng, MoonConstants{});
            LanderState s0;
            s0.r = scn.r0;
            s0.u = scn.u0;
            s0.m = scn.m0;
            std::vector<LanderState> states{s0};
            std::vector<ThrustCommand> controls{ctrl(0.0)};
            for (int k = 1; k < nodes; ++k) {
                const double t = t_f * k / (nodes - 1);
                const auto seg = propagate(s0, ctrl, eng.isp, p.consts, t, sc);
                states.push_back(seg.back().state);
                controls.push_back(ctrl(t));
            }
            const Vector z = p.pack(states, controls, t_f);
            hs.push_back(t_f / (nodes - 1));
            errs.push_back(p.defects(z).lpNorm<Eigen::Infinity>());
        }
        const double order = 0.5 * (std::log(errs[0] / errs[1]) / std::log(hs[0] / hs[1]) +
                                    std::log(errs[1] / errs[2]) / std::log(hs[1] / hs[2]));
        if (scheme == CollocationScheme::Trapezoidal) {
            pass = pass && order >= 1.9;
            d << "trapezoidal order " << order;
        } else {
            pass = pass && order >= 3.5;
            d << ", hermite-simpson order " << order;
        }
    }
    detail = d.str();
    return pass;
}

bool property_nlp_toys() {
    // bound-constrained parabola
    {
        NlpProblem p;
        p.num_variables = 1;
        p.objective = [](const Vector& x) { return x(0) * x(0); };
        p.lower = Vector::Constant(1, 1.0);
        p.upper = Vector::Constant(1, std::numeric_limits<double>::infinity());
        const auto [x, rep] = solve(p, Vector::Constant(1, 4.0), SolverConfig{});
        if (rep.status != SolverStatus::Converged || std::abs(x(0) - 1.0) > 1e-6) return false;
    }
    // equality-constrained quadratic, optimum (2, -2)
    {
        NlpProblem p;
        p.num_variables = 2;
        p.num_constraints = 1;
        p.objective = [](const Vector& x) {
            return (x(0) - 3.0) * (x(0) - 3.0) + (x(1) + 1.0) * (x(1) + 1.0);
        };
        p.constraints = [](const Vector& x) {
            Vector c(1);
            c(0) = x(0) + x(1);
            return c;
        };
        p.lower = Vector::Constant(2, -std::numeric_limits<double>::infinity());
        p.upper = Vector::Constant(2, std::numeric_limits<double>::infinity());
        const auto [x, rep] = solve(p, Vector::Zero(2), SolverConfig{});
        if (rep.status != SolverStatus::Converged || std::abs(x(0) - 2.0) > 1e-5 ||
            std::abs(x(1) + 2.0) > 1e-5) {
            return false;
        }
    }
    // rosenbrock restricted to the unit circle, against an angular grid oracle
    {
        NlpProblem p;
        p.num_variables = 2;
        p.num_constraints = 1;
        p.objective = [](const Vector& z) {
            const double x = z(0), y = z(1);
            return (1.0 - x) * (1.0 - x) + 100.0 * (y - x * x) * (y - x * x);
        };
        p.constraints = [](const Vector& z) {
            Vector c(1);
            c(0) = z(0) * z(0) + z(1) * z(1) - 1.0;
            return c;
        };
        p.lower = Vector::Constant(2, -2.0);
        p.upper = Vector::Constant(2, 2.0);
        Vector x0(2);
        x0 << 0.5, 0.5;
        SolverConfig cfg;
        cfg.max_outer_iterations = 100;
        const auto [x, rep] = solve(p, x0, cfg);

        auto f = [](double t) {
            const double cx = std::cos(t), cy = std::sin(t);
            return (1.0 - cx) * (1.0 - cx) + 100.0 * (cy - cx * cx) * (cy - cx * cx);
        };
        double best_t = 0.0, best_f = f(0.0);
        for (int i = 1; i < 2000; ++i) {
            const double t = 2.0 * M_PI * i / 2000.0;
            if (f(t) < best_f) {
                best_f = f(t);
                best_t = t;
            }
        }
        double a = best_t - M_PI / 1000.0, b = best_t + M_PI / 1000.0;
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        while (b - a > 1e-14) {
            const double c1 = b - gr * (b - a), d1 = a + gr * (b - a);
            if (f(c1) < f(d1)) b = d1;
            else a = c1;
        }
        const double oracle = f(0.5 * (a + b));
        if (rep.status != SolverStatus::Converged || std::abs(p.objective(x) - oracle) > 1e-6) {
            return false;
        }
    }
    return true;
}

void criterion_7() {
    std::string order_detail;
    const bool energy = property_energy();
    const bool jac = property_jacobian();
    const bool order = property_defect_order(order_detail);
    const bool toys = property_nlp_toys();
    const bool pass = energy && jac && order && toys;
    std::ostringstream d;
    d << "energy " << (energy ? "ok" : "drift") << ", jacobian " << (jac ? "ok" : "mismatch")
      << ", " << order_detail << ", nlp toys " << (toys ? "ok" : "off");
    report(7, pass, "physics and solver property suites", d.str());
}

void criterion_8() {
    const MoonConstants consts;
    ScenarioSpec scn;
    scn.planar_mode = true;
    scn.phi0_free = false;
    scn.nodes = 40;
    const EngineCharacterization eng{12000.0, 305.0, 67.4};
    const auto p = transcribe(scn, eng, consts);
    std::string traj_csv[2];
    for (int run = 0; run < 2; ++run) {
        const auto sol = solve_trajectory(p, SolverConfig{});
        const auto path = (std::filesystem::temp_directory_path() /
                           ("accept_traj_" + std::to_string(run) + ".csv"))
                              .string();
        write_trajectory(sol, p.consts, path);
        traj_csv[run] = read_text_file(path);
        std::filesystem::remove(path);
    }

    SweepSpec spec;
    spec.mode = SweepMode::MaxThrust;
    spec.thrust_grid = SweepSpec::linear_grid(8000.0, 16000.0, 2000.0);
    spec.scenario.nodes = 30;
    spec.parallelism = 4;
    std::string pareto_csv[2];
    for (int run = 0; run < 2; ++run) {
        pareto_csv[run] = pareto_to_csv(sweep(spec));
    }

    const bool pass = traj_csv[0] == traj_csv[1] && pareto_csv[0] == pareto_csv[1];
    std::ostringstream d;
    d << "trajectory csv " << (traj_csv[0] == traj_csv[1] ? "identical" : "differs")
      << ", 4-thread sweep csv " << (pareto_csv[0] == pareto_csv[1] ? "identical" : "differs");
    report(8, pass, "repeated runs are byte-identical, including parallel sweeps", d.str());
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
