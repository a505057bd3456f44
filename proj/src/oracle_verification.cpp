#include "descent/oracle_verification.hpp"

#include <cmath>
#include <sstream>

namespace descent {

void VerticalScenario::validate() const {
    if (h0 <= 0.0) throw std::invalid_argument("VerticalScenario: h0 must be > 0");
    if (m0 <= 0.0 || isp <= 0.0 || t_max <= 0.0 || g0 <= 0.0 || g < 0.0) {
        throw std::invalid_argument("VerticalScenario: non-positive parameter");
    }
    if (v0 < 0.0) throw std::invalid_argument("VerticalScenario: v0 must be >= 0 (downward)");
    if (t_max / m0 <= g) {
        throw std::invalid_argument(
            "VerticalScenario: t_max/m0 must exceed g (no hover/brake possible)");
    }
}

namespace {

// Closed-form burn kinematics under max thrust with mass depletion.
// Downward-positive speed v; tau measured from ignition.
struct BurnModel {
    double m0, mdot, g, ve;  // ve = isp * g0

    double speed(double v_i, double tau) const {
        return v_i + g * tau - ve * std::log(m0 / (m0 - mdot * tau));
    }
    // integral of log(m0/(m0 - mdot s)) ds over [0, tau]
    double log_integral(double tau) const {
        const double mq = m0 - mdot * tau;
        return tau * std::log(m0) -
               (1.0 / mdot) * ((m0 * std::log(m0) - m0) - (mq * std::log(mq) - mq));
    }
    double altitude(double h_i, double v_i, double tau) const {
        return h_i - v_i * tau - 0.5 * g * tau * tau + ve * log_integral(tau);
    }
    // time to zero speed from v_i >= 0; speed is strictly decreasing once
    // thrust acceleration exceeds g
    double zero_speed_time(double v_i) const {
        if (v_i <= 0.0) return 0.0;
        double lo = 0.0;
        double hi = 0.9999 * m0 / mdot;
        // shrink hi until speed(hi) < 0 stays inside the log domain
        while (speed(v_i, hi) > 0.0) {
            hi = 0.5 * (hi + m0 / mdot);
            if (m0 / mdot - hi < 1e-12) {
                throw std::runtime_error("solve_vertical_bangbang: burn depletes vehicle");
            }
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (speed(v_i, mid) > 0.0) lo = mid;
            else hi = mid;
            if (hi - lo < 1e-14 * std::max(1.0, hi)) break;
        }
        return 0.5 * (lo + hi);
    }
};

}  // namespace

BangBangSolution solve_vertical_bangbang(const VerticalScenario& scn, double altitude_tol) {
    scn.validate();
    const BurnModel burn{scn.m0, scn.t_max / (scn.isp * scn.g0), scn.g, scn.isp * scn.g0};

    // Altitude at which velocity reaches zero, as a function of coast time.
    auto stop_altitude = [&](double t_c) {
        const double v_i = scn.v0 + scn.g * t_c;
        const double h_i = scn.h0 - scn.v0 * t_c - 0.5 * scn.g * t_c * t_c;
        const double tau = burn.zero_speed_time(v_i);
        return std::pair<double, double>(burn.altitude(h_i, v_i, tau), tau);
    };

    if (stop_altitude(0.0).first < 0.0) {
        throw std::runtime_error(
            "solve_vertical_bangbang: immediate ignition undershoots (t_max insufficient)");
    }

    // Upper bracket: coast until free-fall ground impact.
    double t_impact;
    if (scn.g > 0.0) {
        t_impact = (-scn.v0 + std::sqrt(scn.v0 * scn.v0 + 2.0 * scn.g * scn.h0)) / scn.g;
    } else {
        if (scn.v0 <= 0.0) {
            throw std::runtime_error("solve_vertical_bangbang: no descent with g=0, v0=0");
        }
        t_impact = scn.h0 / scn.v0;
    }

    double lo = 0.0, hi = t_impact;
    // stop_altitude(hi) <= 0 by construction (ignites at the ground).
    double tau_b = 0.0;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto [h_stop, tau] = stop_altitude(mid);
        if (h_stop > 0.0) lo = mid;
        else hi = mid;
        tau_b = tau;
        if (std::abs(h_stop) < altitude_tol && hi - lo < 1e-12 * std::max(1.0, t_impact)) {
            break;
        }
    }
    const double t_c = 0.5 * (lo + hi);
    const auto [h_stop, tau] = stop_altitude(t_c);
    (void)h_stop;
    tau_b = tau;

    BangBangSolution sol;
    sol.coast_duration = t_c;
    sol.burn_duration = tau_b;
    sol.propellant = burn.mdot * tau_b;
    sol.ignition_speed = scn.v0 + scn.g * t_c;
    sol.ignition_altitude = scn.h0 - scn.v0 * t_c - 0.5 * scn.g * t_c * t_c;
    return sol;
}

ControlSchedule interpolate_controls(const TrajectorySolution& sol) {
    if (sol.controls.size() < 2 || sol.times.size() != sol.controls.size()) {
        throw std::invalid_argument("interpolate_controls: need at least two nodes");
    }
    // Node controls with midpoint equal to the endpoint average: the
    // scheme's implicit control model reduces to linear interpolation per
    // segment for both trapezoidal and Hermite-Simpson solutions.
    return [times = sol.times, controls = sol.controls](double t) {
        if (t <= times.front()) return controls.front();
        if (t >= times.back()) return controls.back();
        size_t k = 1;
        while (times[k] < t) ++k;
        const double tau = (t - times[k - 1]) / (times[k] - times[k - 1]);
        ThrustCommand c;
        c.T = controls[k - 1].T + tau * (controls[k].T - controls[k - 1].T);
        c.alpha = controls[k - 1].alpha + tau * (controls[k].alpha - controls[k - 1].alpha);
        c.beta = controls[k - 1].beta + tau * (controls[k].beta - controls[k - 1].beta);
        return c;
    };
}

OracleReport verify_solution(const TrajectorySolution& sol, const ScenarioSpec& scenario,
                             const EngineCharacterization& engine,
                             const MoonConstants& consts, const OracleTolerances& tol) {
    if (sol.states.empty()) {
        throw std::invalid_argument("verify_solution: empty solution");
    }
    OracleReport rep;
    rep.tolerances = tol;
    if (rep.tolerances.horizontal_m == 0.0) {
        rep.tolerances.horizontal_m = tol.altitude_fraction * (scenario.r0 - scenario.r_f);
    }

    MoonConstants oracle_consts = consts;
    if (scenario.planar_mode) oracle_consts.omega = 0.0;

    StepControl sc = StepControl::adaptive(1e-10, 1e-10);
    sc.check_surface = false;  // corrupted candidates may dip; report deltas instead

    std::vector<TimedState> traj;
    try {
        traj = propagate(sol.states.front(), interpolate_controls(sol), engine.isp,
                         oracle_consts, sol.t_f, sc);
    } catch (const PropagationError& e) {
        rep.propagation_aborted = true;
        rep.abort_time = e.time;
        rep.message = e.what();
        rep.pass = false;
        return rep;
    }

    const LanderState& end = traj.back().state;
    const LanderState& ref = sol.states.back();
    rep.err_altitude_m = std::abs(end.r - ref.r);
    const double dth = (end.theta - ref.theta) * ref.r * std::cos(ref.phi);
    const double dph = (end.phi - ref.phi) * ref.r;
    rep.err_downrange_m = std::hypot(dth, dph);
    rep.err_w_ms = std::abs(end.w - ref.w);
    rep.err_u_ms = std::abs(end.u - ref.u);
    rep.err_v_ms = std::abs(end.v - ref.v);
    rep.propellant_diff_kg = std::abs(end.m - ref.m);

    const double alt_tol = rep.tolerances.altitude_fraction * (scenario.r0 - scenario.r_f);
    rep.pass = rep.err_altitude_m < alt_tol &&
               rep.err_downrange_m < rep.tolerances.horizontal_m &&
               rep.err_w_ms < rep.tolerances.velocity_ms &&
               rep.err_u_ms < rep.tolerances.velocity_ms &&
               rep.err_v_ms < rep.tolerances.velocity_ms &&
               rep.propellant_diff_kg < rep.tolerances.propellant_kg;
    return rep;
}

}  // namespace descent
