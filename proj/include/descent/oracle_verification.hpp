#ifndef DESCENT_ORACLE_VERIFICATION_HPP
#define DESCENT_ORACLE_VERIFICATION_HPP

#include "descent/engine_models.hpp"
#include "descent/moon_dynamics.hpp"
#include "descent/transcription.hpp"

namespace descent {

// Degenerate 1D landing problem with constant gravity: free fall, then a
// single max-thrust burn that zeroes velocity and altitude together.
struct VerticalScenario {
    double h0 = 2000.0;     // initial altitude above target, m
    double v0 = 0.0;        // initial downward speed, m/s
    double g = 1.62;        // constant gravity, m/s^2
    double t_max = 12000.0; // N
    double isp = 305.0;     // s
    double m0 = 4000.0;     // kg
    double g0 = 9.81;       // m/s^2, ISP conversion

    void validate() const;
};

struct BangBangSolution {
    double coast_duration = 0.0;   // s
    double burn_duration = 0.0;    // s
    double propellant = 0.0;       // kg
    double ignition_altitude = 0.0; // m
    double ignition_speed = 0.0;    // m/s, downward
};

// Classical free-fall-then-max-thrust landing, solved by bisection on the
// ignition time with closed-form burn kinematics. Residuals at touchdown:
// |v| < 1e-6 m/s, |h| < altitude_tol.
BangBangSolution solve_vertical_bangbang(const VerticalScenario& scn,
                                         double altitude_tol = 1e-4);

struct OracleTolerances {
    double altitude_fraction = 1e-3;   // of (r0 - r_f)
    double horizontal_m = 0.0;         // 0: derive from altitude tolerance
    double velocity_ms = 1.0;
    double propellant_kg = 0.5;
};

struct OracleReport {
    bool pass = false;
    bool propagation_aborted = false;
    double abort_time = 0.0;
    std::string message;

    double err_altitude_m = 0.0;    // |r - r_target| at t_f
    double err_downrange_m = 0.0;   // r * great-circle angle error
    double err_w_ms = 0.0;
    double err_u_ms = 0.0;
    double err_v_ms = 0.0;
    double propellant_diff_kg = 0.0;

    OracleTolerances tolerances;
};

// Re-propagates the solution's control schedule with the adaptive oracle
// integrator (independent of the collocation defect path) and reports the
// terminal deltas against the solution's own terminal node.
OracleReport verify_solution(const TrajectorySolution& sol, const ScenarioSpec& scenario,
                             const EngineCharacterization& engine,
                             const MoonConstants& consts,
                             const OracleTolerances& tol = OracleTolerances{});

// Control interpolant used for re-propagation: piecewise polynomial per
// segment matching the scheme's implicit control model.
ControlSchedule interpolate_controls(const TrajectorySolution& sol);

}  // namespace descent

#endif
