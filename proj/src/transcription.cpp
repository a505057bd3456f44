#include "descent/transcription.hpp"

#include <cmath>
#include <limits>

namespace descent {

void ScenarioSpec::validate(const MoonConstants& consts) const {
    consts.validate();
    if (!(r0 > r_f && r_f > consts.radius)) {
        throw std::invalid_argument("ScenarioSpec: need r0 > r_f > moon radius");
    }
    if (nodes < 10) throw std::invalid_argument("ScenarioSpec: nodes must be >= 10");
    if (t_f_low <= 0.0 || t_f_high <= t_f_low) {
        throw std::invalid_argument("ScenarioSpec: bad final-time bounds");
    }
    if (m0 <= 0.0) throw std::invalid_argument("ScenarioSpec: m0 must be > 0");
    if (t_min < 0.0) throw std::invalid_argument("ScenarioSpec: t_min must be >= 0");
    if (alpha_max <= 0.0 || beta_max <= 0.0) {
        throw std::invalid_argument("ScenarioSpec: angle bounds must be > 0");
    }
    const double phi_lim = M_PI / 2.0 - kPoleGuard;
    const double phi_init = phi0_free ? phi_f : phi0;
    if (std::abs(phi_init) >= phi_lim || std::abs(phi_f) >= phi_lim) {
        throw std::invalid_argument("ScenarioSpec: latitude at pole guard");
    }
    if (planar_mode) {
        if (v0 != 0.0 || phi0 != phi_f || phi0 != 0.0) {
            throw std::invalid_argument(
                "ScenarioSpec: planar mode requires v0 = 0 and phi0 = phi_f = 0");
        }
        if (alpha_max < M_PI) {
            throw std::invalid_argument("ScenarioSpec: planar mode pins alpha = pi; "
                                        "alpha_max must allow it");
        }
    }
}

Scaling Scaling::make(const MoonConstants& consts, double m0) {
    Scaling s;
    s.length = consts.radius;
    s.speed = std::sqrt(consts.mu / consts.radius);
    s.time = s.length / s.speed;
    s.mass = m0;
    s.force = m0 * consts.mu / (consts.radius * consts.radius);
    return s;
}

Eigen::Matrix<double, 7, 1> Scaling::state_scales() const {
    Eigen::Matrix<double, 7, 1> s;
    s << length, 1.0, 1.0, speed, speed, speed, mass;
    return s;
}

Eigen::Vector3d Scaling::control_scales() const {
    return Eigen::Vector3d(force, 1.0, 1.0);
}

namespace {

using Vec7 = Eigen::Matrix<double, 7, 1>;
using Mat7 = Eigen::Matrix<double, 7, 7>;
using Mat73 = Eigen::Matrix<double, 7, 3>;

Vec7 eval_f(const Vec7& x, const Eigen::Vector3d& u, double isp, const MoonConstants& c) {
    return state_derivative(LanderState::from_vector(x), ThrustCommand{u(0), u(1), u(2)},
                            isp, c)
        .to_vector();
}

void eval_jac(const Vec7& x, const Eigen::Vector3d& u, double isp, const MoonConstants& c,
              Mat7& A, Mat73& B) {
    const auto J = dynamics_jacobian(LanderState::from_vector(x),
                                     ThrustCommand{u(0), u(1), u(2)}, isp, c);
    A = J.leftCols<7>();
    B = J.rightCols<3>();
}

}  // namespace

TranscribedProblem transcribe(const ScenarioSpec& scenario,
                              const EngineCharacterization& engine,
                              const MoonConstants& consts) {
    scenario.validate(consts);
    engine.validate();
    if (scenario.t_min >= engine.max_thrust) {
        throw std::invalid_argument("transcribe: thrust floor at or above engine max thrust");
    }

    TranscribedProblem p;
    p.scenario = scenario;
    p.engine = engine;
    p.consts = consts;
    if (scenario.planar_mode) p.consts.omega = 0.0;
    p.scaling = Scaling::make(consts, scenario.m0);
    p.nodes = scenario.nodes;
    p.dimension = 10 * p.nodes + 1;
    p.num_defects = 7 * (p.nodes - 1);
    p.low_thrust_warning =
        engine.max_thrust / scenario.m0 <= consts.mu / (scenario.r_f * scenario.r_f);

    const Vec7 ss = p.scaling.state_scales();
    const Eigen::Vector3d cs = p.scaling.control_scales();
    const int N = p.nodes;

    p.lower = Vector::Constant(p.dimension, -std::numeric_limits<double>::infinity());
    p.upper = Vector::Constant(p.dimension, std::numeric_limits<double>::infinity());

    const double vel_band = std::sqrt(scenario.w0 * scenario.w0 + scenario.u0 * scenario.u0 +
                                      scenario.v0 * scenario.v0) +
                            2000.0;
    const double phi_lim = M_PI / 2.0 - 2.0 * kPoleGuard;
    for (int k = 0; k < N; ++k) {
        p.lower(p.state_index(k, 0)) = consts.radius / ss(0);
        p.upper(p.state_index(k, 0)) = (scenario.r0 + 1e5) / ss(0);
        p.lower(p.state_index(k, 1)) = scenario.theta_f - 2.0;
        p.upper(p.state_index(k, 1)) = scenario.theta_f + 2.0;
        p.lower(p.state_index(k, 2)) = -phi_lim;
        p.upper(p.state_index(k, 2)) = phi_lim;
        for (int c = 3; c < 6; ++c) {
            p.lower(p.state_index(k, c)) = -vel_band / ss(c);
            p.upper(p.state_index(k, c)) = vel_band / ss(c);
        }
        p.lower(p.state_index(k, 6)) = 0.01;  // mass floor, scaled by m0
        p.upper(p.state_index(k, 6)) = 1.0;
        p.lower(p.control_index(k, 0)) = scenario.t_min / cs(0);
        p.upper(p.control_index(k, 0)) = engine.max_thrust / cs(0);
        p.lower(p.control_index(k, 1)) = -scenario.alpha_max;
        p.upper(p.control_index(k, 1)) = scenario.alpha_max;
        p.lower(p.control_index(k, 2)) = -scenario.beta_max;
        p.upper(p.control_index(k, 2)) = scenario.beta_max;
    }
    p.lower(p.tf_index()) = scenario.t_f_low / p.scaling.time;
    p.upper(p.tf_index()) = scenario.t_f_high / p.scaling.time;

    auto pin = [&](int idx, double value) {
        p.lower(idx) = value;
        p.upper(idx) = value;
    };

    // Initial boundary: r, w, u, v, m always; theta/phi unless free.
    pin(p.state_index(0, 0), scenario.r0 / ss(0));
    pin(p.state_index(0, 3), scenario.w0 / ss(3));
    pin(p.state_index(0, 4), scenario.u0 / ss(4));
    pin(p.state_index(0, 5), scenario.v0 / ss(5));
    pin(p.state_index(0, 6), 1.0);
    p.num_boundary = 5;
    if (!scenario.theta0_free) {
        pin(p.state_index(0, 1), scenario.theta0);
        ++p.num_boundary;
    }
    const bool phi0_pinned = !scenario.phi0_free || scenario.planar_mode;
    if (phi0_pinned) {
        pin(p.state_index(0, 2), scenario.planar_mode ? scenario.phi0 : scenario.phi0);
        ++p.num_boundary;
    }

    // Final boundary: full position and zero velocity.
    pin(p.state_index(N - 1, 0), scenario.r_f / ss(0));
    pin(p.state_index(N - 1, 1), scenario.theta_f);
    pin(p.state_index(N - 1, 2), scenario.phi_f);
    pin(p.state_index(N - 1, 3), 0.0);
    pin(p.state_index(N - 1, 4), 0.0);
    pin(p.state_index(N - 1, 5), 0.0);
    p.num_boundary += 6;

    if (scenario.planar_mode) {
        // Pin crossrange states and the out-of-plane pointing angle at every node.
        for (int k = 0; k < N; ++k) {
            pin(p.state_index(k, 2), scenario.phi0);
            pin(p.state_index(k, 5), 0.0);
            pin(p.control_index(k, 1), M_PI);
        }
    }
    return p;
}

Vector TranscribedProblem::defects(const Vector& z) const {
    const int N = nodes;
    const Vec7 ss = scaling.state_scales();
    const Eigen::Vector3d cs = scaling.control_scales();
    const double tf = z(tf_index()) * scaling.time;
    const double h = tf / (N - 1);

    Vector d(num_defects);
    try {
        Vec7 xk = z.segment<7>(state_index(0, 0)).cwiseProduct(ss);
        Eigen::Vector3d uk = z.segment<3>(control_index(0, 0)).cwiseProduct(cs);
        Vec7 fk = eval_f(xk, uk, engine.isp, consts);
        for (int k = 0; k + 1 < N; ++k) {
            const Vec7 xk1 = z.segment<7>(state_index(k + 1, 0)).cwiseProduct(ss);
            const Eigen::Vector3d uk1 =
                z.segment<3>(control_index(k + 1, 0)).cwiseProduct(cs);
            const Vec7 fk1 = eval_f(xk1, uk1, engine.isp, consts);

            Vec7 defect;
            if (scenario.scheme == CollocationScheme::HermiteSimpson) {
                const Vec7 xm = 0.5 * (xk + xk1) + (h / 8.0) * (fk - fk1);
                const Eigen::Vector3d um = 0.5 * (uk + uk1);
                const Vec7 fm = eval_f(xm, um, engine.isp, consts);
                defect = xk1 - xk - (h / 6.0) * (fk + 4.0 * fm + fk1);
            } else {
                defect = xk1 - xk - (h / 2.0) * (fk + fk1);
            }
            d.segment<7>(7 * k) = defect.cwiseQuotient(ss);

            xk = xk1;
            uk = uk1;
            fk = fk1;
        }
    } catch (const std::domain_error&) {
        d.setConstant(std::numeric_limits<double>::quiet_NaN());
    }
    return d;
}

SparseMatrix TranscribedProblem::defect_jacobian(const Vector& z) const {
    const int N = nodes;
    const Vec7 ss = scaling.state_scales();
    const Eigen::Vector3d cs = scaling.control_scales();
    const double tf = z(tf_index()) * scaling.time;
    const double h = tf / (N - 1);
    const double dh_dtf = 1.0 / (N - 1);

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(num_defects) * 22);

    auto add_block = [&](int row0, int col0, const Eigen::MatrixXd& block,
                         const Eigen::VectorXd& col_scales) {
        for (int i = 0; i < block.rows(); ++i) {
            for (int j = 0; j < block.cols(); ++j) {
                const double v = block(i, j) * col_scales(j) / ss(i);
                if (v != 0.0) trips.emplace_back(row0 + i, col0 + j, v);
            }
        }
    };

    try {
        Vec7 xk = z.segment<7>(state_index(0, 0)).cwiseProduct(ss);
        Eigen::Vector3d uk = z.segment<3>(control_index(0, 0)).cwiseProduct(cs);
        Vec7 fk = eval_f(xk, uk, engine.isp, consts);
        Mat7 Ak;
        Mat73 Bk;
        eval_jac(xk, uk, engine.isp, consts, Ak, Bk);

        for (int k = 0; k + 1 < N; ++k) {
            const Vec7 xk1 = z.segment<7>(state_index(k + 1, 0)).cwiseProduct(ss);
            const Eigen::Vector3d uk1 =
                z.segment<3>(control_index(k + 1, 0)).cwiseProduct(cs);
            const Vec7 fk1 = eval_f(xk1, uk1, engine.isp, consts);
            Mat7 Ak1;
            Mat73 Bk1;
            eval_jac(xk1, uk1, engine.isp, consts, Ak1, Bk1);

            Mat7 Dxk, Dxk1;
            Mat73 Duk, Duk1;
            Vec7 Dh;
            const Mat7 I = Mat7::Identity();
            if (scenario.scheme == CollocationScheme::HermiteSimpson) {
                const Vec7 xm = 0.5 * (xk + xk1) + (h / 8.0) * (fk - fk1);
                const Eigen::Vector3d um = 0.5 * (uk + uk1);
                const Vec7 fm = eval_f(xm, um, engine.isp, consts);
                Mat7 Am;
                Mat73 Bm;
                eval_jac(xm, um, engine.isp, consts, Am, Bm);

                Dxk = -I - (h / 6.0) * (Ak + 4.0 * Am * (0.5 * I + (h / 8.0) * Ak));
                Dxk1 = I - (h / 6.0) * (Ak1 + 4.0 * Am * (0.5 * I - (h / 8.0) * Ak1));
                Duk = -(h / 6.0) * (Bk + 4.0 * ((h / 8.0) * Am * Bk + 0.5 * Bm));
                Duk1 = -(h / 6.0) * (Bk1 + 4.0 * (-(h / 8.0) * Am * Bk1 + 0.5 * Bm));
                Dh = -(fk + 4.0 * fm + fk1) / 6.0 - (h / 12.0) * (Am * (fk - fk1));
            } else {
                Dxk = -I - (h / 2.0) * Ak;
                Dxk1 = I - (h / 2.0) * Ak1;
                Duk = -(h / 2.0) * Bk;
                Duk1 = -(h / 2.0) * Bk1;
                Dh = -(fk + fk1) / 2.0;
            }

            const int row0 = 7 * k;
            add_block(row0, state_index(k, 0), Dxk, ss);
            add_block(row0, control_index(k, 0), Duk, cs);
            add_block(row0, state_index(k + 1, 0), Dxk1, ss);
            add_block(row0, control_index(k + 1, 0), Duk1, cs);
            for (int i = 0; i < 7; ++i) {
                const double v = Dh(i) * dh_dtf * scaling.time / ss(i);
                if (v != 0.0) trips.emplace_back(row0 + i, tf_index(), v);
            }

            xk = xk1;
            uk = uk1;
            fk = fk1;
            Ak = Ak1;
            Bk = Bk1;
        }
    } catch (const std::domain_error&) {
        // leave structurally empty; the NaN defects already poison the iterate
        trips.clear();
    }

    SparseMatrix J(num_defects, dimension);
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

double TranscribedProblem::objective(const Vector& z) const {
    return -z(state_index(nodes - 1, 6));
}

Vector TranscribedProblem::objective_gradient(const Vector& z) const {
    Vector g = Vector::Zero(dimension);
    (void)z;
    g(state_index(nodes - 1, 6)) = -1.0;
    return g;
}

std::vector<std::pair<int, int>> TranscribedProblem::jacobian_sparsity() const {
    std::vector<std::pair<int, int>> pattern;
    for (int k = 0; k + 1 < nodes; ++k) {
        for (int i = 0; i < 7; ++i) {
            const int row = 7 * k + i;
            for (int j = 0; j < 20; ++j) pattern.emplace_back(row, 10 * k + j);
            pattern.emplace_back(row, tf_index());
        }
    }
    return pattern;
}

NlpProblem TranscribedProblem::to_nlp() const {
    NlpProblem nlp;
    nlp.num_variables = dimension;
    nlp.num_constraints = num_defects;
    nlp.objective = [this](const Vector& z) { return objective(z); };
    nlp.objective_gradient = [this](const Vector& z) { return objective_gradient(z); };
    nlp.constraints = [this](const Vector& z) { return defects(z); };
    nlp.constraint_jacobian = [this](const Vector& z) { return defect_jacobian(z); };
    nlp.jacobian_sparsity = jacobian_sparsity();
    nlp.lower = lower;
    nlp.upper = upper;
    return nlp;
}

LanderState TranscribedProblem::state_at(const Vector& z, int node) const {
    const Vec7 x = z.segment<7>(state_index(node, 0)).cwiseProduct(scaling.state_scales());
    return LanderState::from_vector(x);
}

ThrustCommand TranscribedProblem::control_at(const Vector& z, int node) const {
    const Eigen::Vector3d u =
        z.segment<3>(control_index(node, 0)).cwiseProduct(scaling.control_scales());
    return ThrustCommand{u(0), u(1), u(2)};
}

double TranscribedProblem::final_time(const Vector& z) const {
    return z(tf_index()) * scaling.time;
}

Vector TranscribedProblem::pack(const std::vector<LanderState>& states,
                                const std::vector<ThrustCommand>& controls,
                                double t_f) const {
    if (static_cast<int>(states.size()) != nodes ||
        static_cast<int>(controls.size()) != nodes) {
        throw std::invalid_argument("pack: node count mismatch");
    }
    const Vec7 ss = scaling.state_scales();
    const Eigen::Vector3d cs = scaling.control_scales();
    Vector z(dimension);
    for (int k = 0; k < nodes; ++k) {
        z.segment<7>(state_index(k, 0)) = states[k].to_vector().cwiseQuotient(ss);
        Eigen::Vector3d u(controls[k].T, controls[k].alpha, controls[k].beta);
        z.segment<3>(control_index(k, 0)) = u.cwiseQuotient(cs);
    }
    z(tf_index()) = t_f / scaling.time;
    return z;
}

Vector initial_guess(const TranscribedProblem& p) {
    const ScenarioSpec& sc = p.scenario;
    const int N = p.nodes;
    const double speed0 =
        std::sqrt(sc.w0 * sc.w0 + sc.u0 * sc.u0 + sc.v0 * sc.v0);
    const double accel0 = p.engine.max_thrust / sc.m0;
    double tf_seed = speed0 > 0.0 ? speed0 / accel0 : 0.5 * (sc.t_f_low + sc.t_f_high);
    tf_seed = std::clamp(tf_seed, sc.t_f_low, sc.t_f_high);

    // Free initial angles: back out from the target using the average
    // horizontal velocity over the seeded duration.
    double theta0 = sc.theta0_free
                        ? sc.theta_f - sc.u0 * tf_seed / (2.0 * sc.r0 * std::cos(sc.phi_f))
                        : sc.theta0;
    double phi0 = (sc.phi0_free && !sc.planar_mode)
                      ? sc.phi_f - sc.v0 * tf_seed / (2.0 * sc.r0)
                      : sc.phi0;

    const double m_end = sc.m0 * std::exp(-speed0 / (p.engine.isp * p.consts.g0));
    const double alpha_ret =
        (sc.u0 == 0.0 && sc.v0 == 0.0) ? M_PI : std::atan2(-sc.v0, -sc.u0);

    std::vector<LanderState> states(N);
    std::vector<ThrustCommand> controls(N);
    for (int k = 0; k < N; ++k) {
        const double tau = static_cast<double>(k) / (N - 1);
        LanderState s;
        s.r = sc.r0 + tau * (sc.r_f - sc.r0);
        s.theta = theta0 + tau * (sc.theta_f - theta0);
        s.phi = phi0 + tau * (sc.phi_f - phi0);
        s.w = sc.w0 * (1.0 - tau);
        s.u = sc.u0 * (1.0 - tau);
        s.v = sc.v0 * (1.0 - tau);
        s.m = sc.m0 + tau * (m_end - sc.m0);
        states[k] = s;
        controls[k] = ThrustCommand{0.7 * p.engine.max_thrust,
                                    sc.planar_mode ? M_PI : alpha_ret, 0.1};
    }
    Vector z = p.pack(states, controls, tf_seed);
    return z.cwiseMax(p.lower).cwiseMin(p.upper);
}

TrajectorySolution extract_solution(const TranscribedProblem& p, const Vector& z,
                                    const SolverReport& report) {
    if (z.size() != p.dimension) {
        throw std::invalid_argument("extract_solution: dimension mismatch");
    }
    TrajectorySolution sol;
    sol.scheme = p.scenario.scheme;
    sol.t_f = p.final_time(z);
    const int N = p.nodes;
    sol.times.resize(N);
    sol.states.resize(N);
    sol.controls.resize(N);
    for (int k = 0; k < N; ++k) {
        sol.times[k] = sol.t_f * k / (N - 1);
        sol.states[k] = p.state_at(z, k);
        sol.controls[k] = p.control_at(z, k);
    }
    sol.final_mass = sol.states.back().m;
    sol.objective = report.objective;
    sol.status = report.status;
    sol.iterations = report.iterations;
    const Vector d = p.defects(z);
    sol.max_defect = d.allFinite() ? d.lpNorm<Eigen::Infinity>()
                                   : std::numeric_limits<double>::infinity();
    return sol;
}

TrajectorySolution solve_trajectory(const TranscribedProblem& problem,
                                    const SolverConfig& config) {
    const Vector z0 = initial_guess(problem);
    auto [z, report] = solve(problem.to_nlp(), z0, config);
    return extract_solution(problem, z, report);
}

}  // namespace descent
