#ifndef DESCENT_MOON_DYNAMICS_HPP
#define DESCENT_MOON_DYNAMICS_HPP

#include <Eigen/Core>
#include <functional>
#include <stdexcept>
#include <vector>

namespace descent {

// Physical constants for the moon-centered rotating spherical frame.
// Defaults reproduce a 1.62 m/s^2 surface gravity.
struct MoonConstants {
    double mu = 4.9028e12;      // gravitational parameter, m^3/s^2
    double omega = 2.6617e-6;   // lunar rotation rate, rad/s
    double radius = 1.7374e6;   // mean lunar radius, m
    double g0 = 9.81;           // standard gravity for ISP conversion, m/s^2

    // When true, the radial gravity term is held constant at mu/radius^2
    // instead of mu/r^2 (flat-gravity mode for short altitude spans).
    bool flat_gravity = false;

    double surface_gravity() const { return mu / (radius * radius); }
    void validate() const;
};

// Translational state: position in spherical coordinates, velocity
// components, total mass. theta is longitude, phi is latitude (the
// convention forced by theta_dot = u/(r cos phi)).
struct LanderState {
    double r = 0.0;      // radial distance from moon center, m
    double theta = 0.0;  // longitude, rad
    double phi = 0.0;    // latitude, rad
    double w = 0.0;      // radial velocity, m/s
    double u = 0.0;      // tangential (east) velocity, m/s
    double v = 0.0;      // cross (north) velocity, m/s
    double m = 0.0;      // total vehicle mass, kg

    Eigen::Matrix<double, 7, 1> to_vector() const;
    static LanderState from_vector(const Eigen::Matrix<double, 7, 1>& x);
};

// Thrust magnitude plus body-frame pointing angles at one instant.
struct ThrustCommand {
    double T = 0.0;      // thrust magnitude, N
    double alpha = 0.0;  // right-ascension pointing angle, rad
    double beta = 0.0;   // declination pointing angle, rad
};

struct StateDerivative {
    double r_dot = 0.0;
    double theta_dot = 0.0;
    double phi_dot = 0.0;
    double w_dot = 0.0;
    double u_dot = 0.0;
    double v_dot = 0.0;
    double m_dot = 0.0;

    Eigen::Matrix<double, 7, 1> to_vector() const;
};

// Latitude band within which the dynamics are evaluated; poles are
// rejected, not regularized.
inline constexpr double kPoleGuard = 1e-6;

// Thrown when propagation hits the surface or a singularity guard.
class PropagationError : public std::runtime_error {
public:
    PropagationError(const std::string& what, double t)
        : std::runtime_error(what), time(t) {}
    double time;
};

// Translational equations of motion in the rotating spherical frame:
// thrust, gravity, curvature, Coriolis and centrifugal terms, plus
// mass depletion m_dot = -T/(isp*g0).
StateDerivative state_derivative(const LanderState& state, const ThrustCommand& cmd,
                                 double isp, const MoonConstants& consts);

// Partials of the state derivative w.r.t. (r,theta,phi,w,u,v,m,T,alpha,beta).
// Rows follow the state order, columns state-then-control.
Eigen::Matrix<double, 7, 10> dynamics_jacobian(const LanderState& state,
                                               const ThrustCommand& cmd,
                                               double isp,
                                               const MoonConstants& consts);

using ControlSchedule = std::function<ThrustCommand(double)>;

struct StepControl {
    enum class Mode { FixedStep, Adaptive };
    Mode mode = Mode::Adaptive;
    double fixed_dt = 1.0;     // s, FixedStep only
    double rel_tol = 1e-10;    // Adaptive only
    double abs_tol = 1e-10;
    // Surface-impact guard may be disabled for descent-through-target
    // re-propagation checks.
    bool check_surface = true;

    static StepControl fixed(double dt) {
        return StepControl{Mode::FixedStep, dt, 0.0, 0.0, true};
    }
    static StepControl adaptive(double rtol = 1e-10, double atol = 1e-10) {
        return StepControl{Mode::Adaptive, 0.0, rtol, atol, true};
    }
};

struct TimedState {
    double t;
    LanderState state;
};

// Propagates the dynamics over [0, t_span] under the given control
// schedule. FixedStep uses classical RK4; Adaptive uses a Dormand-Prince
// 5(4) embedded pair. The last sample lands exactly on t_span.
std::vector<TimedState> propagate(const LanderState& initial,
                                  const ControlSchedule& control_schedule,
                                  double isp, const MoonConstants& consts,
                                  double t_span, const StepControl& step_control);

}  // namespace descent

#endif
