#ifndef DESCENT_TRANSCRIPTION_HPP
#define DESCENT_TRANSCRIPTION_HPP

#include "descent/engine_models.hpp"
#include "descent/moon_dynamics.hpp"
#include "descent/nlp_core.hpp"

namespace descent {

enum class CollocationScheme { HermiteSimpson, Trapezoidal };

// Boundary conditions, control bounds and discretization choices for one
// inner minimum-fuel problem. Initial longitude/latitude may be left free
// so the optimizer picks the powered-descent start point.
struct ScenarioSpec {
    double r0 = 1.7374e6 + 30000.0;  // m
    double w0 = 0.0;                 // m/s
    double u0 = 1688.0;              // m/s
    double v0 = 0.0;                 // m/s
    double m0 = 4000.0;              // kg
    bool theta0_free = true;
    bool phi0_free = true;
    double theta0 = 0.0;             // rad, used when not free
    double phi0 = 0.0;               // rad, used when not free (and in planar mode)

    double r_f = 1.7374e6 + 800.0;   // m
    double theta_f = 0.0;            // rad
    double phi_f = 0.0;              // rad

    double t_min = 0.0;              // N, deep-throttle floor
    double alpha_max = M_PI;         // rad
    double beta_max = M_PI / 2.0;    // rad

    bool planar_mode = false;
    int nodes = 60;
    double t_f_low = 50.0;           // s
    double t_f_high = 2000.0;        // s
    CollocationScheme scheme = CollocationScheme::HermiteSimpson;

    void validate(const MoonConstants& consts) const;
};

// Characteristic units used to nondimensionalize the NLP.
struct Scaling {
    double length = 1.0;  // m
    double speed = 1.0;   // m/s
    double time = 1.0;    // s
    double mass = 1.0;    // kg
    double force = 1.0;   // N

    static Scaling make(const MoonConstants& consts, double m0);
    Eigen::Matrix<double, 7, 1> state_scales() const;
    Eigen::Vector3d control_scales() const;
};

// Converged (or attempted) trajectory in physical units.
struct TrajectorySolution {
    std::vector<double> times;             // s, node times
    std::vector<LanderState> states;       // per node
    std::vector<ThrustCommand> controls;   // per node
    double t_f = 0.0;                      // s
    double final_mass = 0.0;               // kg
    double objective = 0.0;                // scaled objective value
    SolverStatus status = SolverStatus::MaxIterations;
    int iterations = 0;
    double max_defect = 0.0;               // scaled inf-norm, re-evaluated
    CollocationScheme scheme = CollocationScheme::HermiteSimpson;
};

// Direct-collocation NLP instance: decision vector of per-node states and
// controls plus the free final time (dimension 10N+1), defect equality
// constraints, and scaled box bounds with boundary components pinned via
// coincident bounds.
class TranscribedProblem {
public:
    ScenarioSpec scenario;
    EngineCharacterization engine;
    MoonConstants consts;   // omega zeroed in planar mode
    Scaling scaling;

    int nodes = 0;
    int dimension = 0;        // 10N + 1
    int num_defects = 0;      // 7 (N-1)
    int num_boundary = 0;     // pinned boundary components
    bool low_thrust_warning = false;  // T_max/m0 below surface gravity at r_f

    Vector lower;  // scaled
    Vector upper;  // scaled

    int state_index(int node, int comp) const { return 10 * node + comp; }
    int control_index(int node, int comp) const { return 10 * node + 7 + comp; }
    int tf_index() const { return dimension - 1; }

    Vector defects(const Vector& z) const;
    SparseMatrix defect_jacobian(const Vector& z) const;
    double objective(const Vector& z) const;
    Vector objective_gradient(const Vector& z) const;
    std::vector<std::pair<int, int>> jacobian_sparsity() const;

    NlpProblem to_nlp() const;

    LanderState state_at(const Vector& z, int node) const;
    ThrustCommand control_at(const Vector& z, int node) const;
    double final_time(const Vector& z) const;

    // Inverse of the node extraction; used for round-trip tests and for
    // evaluating defects on externally generated trajectories.
    Vector pack(const std::vector<LanderState>& states,
                const std::vector<ThrustCommand>& controls, double t_f) const;
};

TranscribedProblem transcribe(const ScenarioSpec& scenario,
                              const EngineCharacterization& engine,
                              const MoonConstants& consts);

// Deterministic cold-start guess: linear state interpolation, Tsiolkovsky
// mass ramp, 70% retrograde thrust, t_f seeded from delta-v over initial
// acceleration.
Vector initial_guess(const TranscribedProblem& problem);

TrajectorySolution extract_solution(const TranscribedProblem& problem, const Vector& z,
                                    const SolverReport& report);

// Convenience driver: guess, solve, extract.
TrajectorySolution solve_trajectory(const TranscribedProblem& problem,
                                    const SolverConfig& config);

}  // namespace descent

#endif
