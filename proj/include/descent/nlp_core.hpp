#ifndef DESCENT_NLP_CORE_HPP
#define DESCENT_NLP_CORE_HPP

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <string>
#include <vector>

namespace descent {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Smooth NLP: minimize objective subject to equality constraints and box
// bounds. Analytic derivative evaluators are optional; missing ones are
// replaced by central finite differences (colored when a sparsity pattern
// is supplied).
struct NlpProblem {
    int num_variables = 0;
    int num_constraints = 0;

    std::function<double(const Vector&)> objective;
    std::function<Vector(const Vector&)> objective_gradient;          // optional
    std::function<SparseMatrix(const Vector&)> objective_hessian;     // optional
    std::function<Vector(const Vector&)> constraints;                 // required if num_constraints > 0
    std::function<SparseMatrix(const Vector&)> constraint_jacobian;   // optional
    std::vector<std::pair<int, int>> jacobian_sparsity;               // optional, enables colored FD

    Vector lower;
    Vector upper;

    void validate() const;
};

struct SolverConfig {
    int max_outer_iterations = 50;
    int max_inner_iterations = 200;
    double penalty_initial = 10.0;
    double penalty_growth = 10.0;
    double penalty_max = 1e12;
    double constraint_tol = 1e-6;
    double stationarity_tol = 1e-6;
    double fd_relative_step = 1e-7;
    double armijo_slope = 1e-4;
    double line_search_shrink = 0.5;
    int max_line_search_steps = 40;
    unsigned random_seed = 0;  // unused; solver is deterministic
    bool verbose = false;
};

enum class SolverStatus { Converged, MaxIterations, Infeasible, NumericalFailure };

const char* to_string(SolverStatus status);

struct SolverReport {
    SolverStatus status = SolverStatus::MaxIterations;
    int iterations = 0;                  // outer iterations
    int inner_iterations = 0;            // total inner steps
    double constraint_violation = 0.0;   // inf-norm at the returned point
    double stationarity = 0.0;           // projected Lagrangian gradient inf-norm
    double objective = 0.0;
    bool x0_clamped = false;
    std::vector<double> violation_history;  // per outer iteration
    std::string message;
};

// Augmented Lagrangian over the equality constraints with a damped
// projected Gauss-Newton inner loop over the box. Deterministic given
// (problem, x0, config); the returned point respects bounds exactly.
std::pair<Vector, SolverReport> solve(const NlpProblem& problem, const Vector& x0,
                                      const SolverConfig& config);

struct GradientCheckReport {
    double objective_max_rel = 0.0;   // 0 when no analytic gradient present
    double jacobian_max_rel = 0.0;    // 0 when no analytic Jacobian present
    double max_rel = 0.0;
};

// Compares analytic derivative evaluators against central finite
// differences at x. Diagnostic only.
GradientCheckReport check_gradients(const NlpProblem& problem, const Vector& x);

// Finite-difference constraint Jacobian; colored when the problem carries
// a sparsity pattern, dense column sweep otherwise. Exposed for tests.
SparseMatrix fd_constraint_jacobian(const NlpProblem& problem, const Vector& x,
                                    double rel_step);

}  // namespace descent

#endif
