#include "descent/moon_dynamics.hpp"

#include <cmath>
#include <sstream>

namespace descent {

void MoonConstants::validate() const {
    if (mu <= 0.0 || radius <= 0.0 || omega < 0.0 || g0 <= 0.0) {
        throw std::invalid_argument("MoonConstants: mu, radius, g0 must be > 0 and omega >= 0");
    }
}

Eigen::Matrix<double, 7, 1> LanderState::to_vector() const {
    Eigen::Matrix<double, 7, 1> x;
    x << r, theta, phi, w, u, v, m;
    return x;
}

LanderState LanderState::from_vector(const Eigen::Matrix<double, 7, 1>& x) {
    return LanderState{x(0), x(1), x(2), x(3), x(4), x(5), x(6)};
}

Eigen::Matrix<double, 7, 1> StateDerivative::to_vector() const {
    Eigen::Matrix<double, 7, 1> x;
    x << r_dot, theta_dot, phi_dot, w_dot, u_dot, v_dot, m_dot;
    return x;
}

namespace {

void check_guards(const LanderState& s) {
    if (s.r <= 0.0) {
        throw std::domain_error("state_derivative: r <= 0");
    }
    if (std::abs(s.phi) >= M_PI / 2.0 - kPoleGuard) {
        throw std::domain_error("state_derivative: latitude at pole guard");
    }
    if (s.m <= 0.0) {
        throw std::domain_error("state_derivative: m <= 0");
    }
}

}  // namespace

StateDerivative state_derivative(const LanderState& s, const ThrustCommand& cmd,
                                 double isp, const MoonConstants& c) {
    check_guards(s);
    if (isp <= 0.0) {
        throw std::domain_error("state_derivative: isp <= 0");
    }

    const double sphi = std::sin(s.phi);
    const double cphi = std::cos(s.phi);
    const double tphi = sphi / cphi;
    const double sa = std::sin(cmd.alpha);
    const double ca = std::cos(cmd.alpha);
    const double sb = std::sin(cmd.beta);
    const double cb = std::cos(cmd.beta);
    const double w2 = c.omega * c.omega;

    const double gravity = c.flat_gravity ? c.surface_gravity() : c.mu / (s.r * s.r);

    StateDerivative d;
    d.r_dot = s.w;
    d.theta_dot = s.u / (s.r * cphi);
    d.phi_dot = s.v / s.r;
    d.w_dot = cmd.T * sb / s.m - gravity + (s.u * s.u + s.v * s.v) / s.r
              - 2.0 * s.u * c.omega * cphi + s.r * w2 * cphi * cphi;
    d.u_dot = cmd.T * ca * cb / s.m + (-s.u * s.w + s.u * s.v * tphi) / s.r
              - 2.0 * s.w * c.omega * cphi + 2.0 * s.v * c.omega * sphi;
    d.v_dot = cmd.T * sa * cb / s.m + (-s.v * s.w - s.u * s.u * tphi) / s.r
              - 2.0 * s.u * c.omega * sphi - s.r * w2 * sphi * cphi;
    d.m_dot = -cmd.T / (isp * c.g0);
    return d;
}

Eigen::Matrix<double, 7, 10> dynamics_jacobian(const LanderState& s,
                                               const ThrustCommand& cmd,
                                               double isp,
                                               const MoonConstants& c) {
    check_guards(s);
    if (isp <= 0.0) {
        throw std::domain_error("dynamics_jacobian: isp <= 0");
    }

    const double sphi = std::sin(s.phi);
    const double cphi = std::cos(s.phi);
    const double tphi = sphi / cphi;
    const double sec2 = 1.0 + tphi * tphi;
    const double sa = std::sin(cmd.alpha);
    const double ca = std::cos(cmd.alpha);
    const double sb = std::sin(cmd.beta);
    const double cb = std::cos(cmd.beta);
    const double w2 = c.omega * c.omega;
    const double r = s.r, u = s.u, v = s.v, w = s.w, m = s.m, T = cmd.T;
    const double r2 = r * r;

    // Column order: r, theta, phi, w, u, v, m, T, alpha, beta.
    enum { R, TH, PH, W, U, V, M, CT, CA, CB };
    Eigen::Matrix<double, 7, 10> J = Eigen::Matrix<double, 7, 10>::Zero();

    // r_dot = w
    J(0, W) = 1.0;

    // theta_dot = u/(r cphi)
    J(1, R) = -u / (r2 * cphi);
    J(1, PH) = u * tphi / (r * cphi);
    J(1, U) = 1.0 / (r * cphi);

    // phi_dot = v/r
    J(2, R) = -v / r2;
    J(2, V) = 1.0 / r;

    // w_dot
    const double dgrav_dr = c.flat_gravity ? 0.0 : -2.0 * c.mu / (r2 * r);
    J(3, R) = -dgrav_dr - (u * u + v * v) / r2 + w2 * cphi * cphi;
    J(3, PH) = 2.0 * u * c.omega * sphi - 2.0 * r * w2 * cphi * sphi;
    J(3, U) = 2.0 * u / r - 2.0 * c.omega * cphi;
    J(3, V) = 2.0 * v / r;
    J(3, M) = -T * sb / (m * m);
    J(3, CT) = sb / m;
    J(3, CB) = T * cb / m;

    // u_dot
    J(4, R) = (u * w - u * v * tphi) / r2;
    J(4, PH) = u * v * sec2 / r + 2.0 * w * c.omega * sphi + 2.0 * v * c.omega * cphi;
    J(4, W) = -u / r - 2.0 * c.omega * cphi;
    J(4, U) = (-w + v * tphi) / r;
    J(4, V) = u * tphi / r + 2.0 * c.omega * sphi;
    J(4, M) = -T * ca * cb / (m * m);
    J(4, CT) = ca * cb / m;
    J(4, CA) = -T * sa * cb / m;
    J(4, CB) = -T * ca * sb / m;

    // v_dot
    J(5, R) = (v * w + u * u * tphi) / r2 - w2 * sphi * cphi;
    J(5, PH) = -u * u * sec2 / r - 2.0 * u * c.omega * cphi
               - r * w2 * (cphi * cphi - sphi * sphi);
    J(5, W) = -v / r;
    J(5, U) = -2.0 * u * tphi / r - 2.0 * c.omega * sphi;
    J(5, V) = -w / r;
    J(5, M) = -T * sa * cb / (m * m);
    J(5, CT) = sa * cb / m;
    J(5, CA) = T * ca * cb / m;
    J(5, CB) = -T * sa * sb / m;

    // m_dot
    J(6, CT) = -1.0 / (isp * c.g0);

    return J;
}

namespace {

using Vec7 = Eigen::Matrix<double, 7, 1>;

Vec7 eval(double t, const Vec7& x, const ControlSchedule& ctrl, double isp,
          const MoonConstants& c) {
    return state_derivative(LanderState::from_vector(x), ctrl(t), isp, c).to_vector();
}

void check_trajectory_guards(double t, const Vec7& x, const MoonConstants& c,
                             bool check_surface) {
    if (check_surface && x(0) < c.radius) {
        throw PropagationError("propagate: surface impact (r < radius)", t);
    }
    if (x(0) <= 0.0 || std::abs(x(2)) >= M_PI / 2.0 - kPoleGuard || x(6) <= 0.0) {
        throw PropagationError("propagate: singularity guard", t);
    }
}

// Dormand-Prince 5(4) coefficients.
constexpr double A21 = 1.0 / 5.0;
constexpr double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0;
constexpr double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0;
constexpr double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0,
                 A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0;
constexpr double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0,
                 A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0;
constexpr double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0,
                 B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0;
constexpr double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0,
                 E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0;

}  // namespace

std::vector<TimedState> propagate(const LanderState& initial,
                                  const ControlSchedule& ctrl, double isp,
                                  const MoonConstants& consts, double t_span,
                                  const StepControl& sc) {
    if (t_span <= 0.0) {
        throw std::invalid_argument("propagate: t_span must be > 0");
    }
    std::vector<TimedState> out;
    Vec7 x = initial.to_vector();
    double t = 0.0;
    check_trajectory_guards(t, x, consts, sc.check_surface);
    out.push_back({t, initial});

    if (sc.mode == StepControl::Mode::FixedStep) {
        if (sc.fixed_dt <= 0.0) {
            throw std::invalid_argument("propagate: fixed_dt must be > 0");
        }
        while (t < t_span) {
            const double h = std::min(sc.fixed_dt, t_span - t);
            const Vec7 k1 = eval(t, x, ctrl, isp, consts);
            const Vec7 k2 = eval(t + h / 2, x + h / 2 * k1, ctrl, isp, consts);
            const Vec7 k3 = eval(t + h / 2, x + h / 2 * k2, ctrl, isp, consts);
            const Vec7 k4 = eval(t + h, x + h * k3, ctrl, isp, consts);
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
            check_trajectory_guards(t, x, consts, sc.check_surface);
            out.push_back({t, LanderState::from_vector(x)});
        }
        out.back().t = t_span;
        return out;
    }

    // Adaptive Dormand-Prince with FSAL.
    double h = t_span / 100.0;
    Vec7 k1 = eval(t, x, ctrl, isp, consts);
    const double h_min = t_span * 1e-14;
    int rejects_in_a_row = 0;
    while (t < t_span) {
        h = std::min(h, t_span - t);
        const Vec7 k2 = eval(t + A21 * h, x + h * (A21 * k1), ctrl, isp, consts);
        const Vec7 k3 = eval(t + 0.3 * h, x + h * (A31 * k1 + A32 * k2), ctrl, isp, consts);
        const Vec7 k4 = eval(t + 0.8 * h, x + h * (A41 * k1 + A42 * k2 + A43 * k3), ctrl, isp, consts);
        const Vec7 k5 = eval(t + 8.0 / 9.0 * h,
                             x + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4), ctrl, isp, consts);
        const Vec7 k6 = eval(t + h,
                             x + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5),
                             ctrl, isp, consts);
        const Vec7 x5 = x + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        const Vec7 k7 = eval(t + h, x5, ctrl, isp, consts);
        const Vec7 err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

        double err_norm = 0.0;
        for (int i = 0; i < 7; ++i) {
            const double scale = sc.abs_tol + sc.rel_tol * std::max(std::abs(x(i)), std::abs(x5(i)));
            err_norm = std::max(err_norm, std::abs(err(i)) / scale);
        }

        if (err_norm <= 1.0 || h <= h_min) {
            t += h;
            x = x5;
            k1 = k7;
            check_trajectory_guards(t, x, consts, sc.check_surface);
            out.push_back({t, LanderState::from_vector(x)});
            rejects_in_a_row = 0;
        } else if (++rejects_in_a_row > 60) {
            throw PropagationError("propagate: step size underflow", t);
        }
        const double factor = 0.9 * std::pow(std::max(err_norm, 1e-10), -0.2);
        h *= std::clamp(factor, 0.2, 5.0);
    }
    out.back().t = t_span;
    return out;
}

}  // namespace descent
