#include "descent/nlp_core.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace descent {

void NlpProblem::validate() const {
    if (num_variables <= 0) throw std::invalid_argument("NlpProblem: num_variables <= 0");
    if (!objective) throw std::invalid_argument("NlpProblem: missing objective");
    if (num_constraints > 0 && !constraints) {
        throw std::invalid_argument("NlpProblem: missing constraint evaluator");
    }
    if (lower.size() != num_variables || upper.size() != num_variables) {
        throw std::invalid_argument("NlpProblem: bound vectors must match num_variables");
    }
    for (int i = 0; i < num_variables; ++i) {
        if (lower(i) > upper(i)) {
            throw std::invalid_argument("NlpProblem: lower > upper at index " + std::to_string(i));
        }
    }
}

const char* to_string(SolverStatus status) {
    switch (status) {
        case SolverStatus::Converged: return "converged";
        case SolverStatus::MaxIterations: return "max_iterations";
        case SolverStatus::Infeasible: return "infeasible";
        case SolverStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

namespace {

Vector clamp_to_bounds(const Vector& x, const Vector& lo, const Vector& hi) {
    return x.cwiseMax(lo).cwiseMin(hi);
}

Vector fd_objective_gradient(const NlpProblem& p, const Vector& x, double rel_step) {
    Vector g(p.num_variables);
    Vector xp = x;
    for (int i = 0; i < p.num_variables; ++i) {
        const double h = rel_step * (1.0 + std::abs(x(i)));
        xp(i) = x(i) + h;
        const double fp = p.objective(xp);
        xp(i) = x(i) - h;
        const double fm = p.objective(xp);
        xp(i) = x(i);
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

// Greedy distance-2 coloring: columns sharing a constraint row get
// distinct colors, so one perturbed evaluation recovers a whole color.
std::vector<int> color_columns(int n, const std::vector<std::pair<int, int>>& pattern) {
    std::vector<std::vector<int>> cols_of_row;
    std::vector<std::vector<int>> rows_of_col(n);
    for (const auto& [r, c] : pattern) {
        if (static_cast<int>(cols_of_row.size()) <= r) cols_of_row.resize(r + 1);
        cols_of_row[r].push_back(c);
        rows_of_col[c].push_back(r);
    }
    std::vector<int> color(n, -1);
    std::vector<int> forbidden(n, -1);
    int num_colors = 0;
    for (int j = 0; j < n; ++j) {
        for (int r : rows_of_col[j]) {
            for (int k : cols_of_row[r]) {
                if (color[k] >= 0) forbidden[color[k]] = j;
            }
        }
        int c = 0;
        while (c < num_colors && forbidden[c] == j) ++c;
        color[j] = c;
        num_colors = std::max(num_colors, c + 1);
    }
    return color;
}

}  // namespace

SparseMatrix fd_constraint_jacobian(const NlpProblem& p, const Vector& x, double rel_step) {
    SparseMatrix J(p.num_constraints, p.num_variables);
    if (p.num_constraints == 0) return J;
    const Vector c0 = p.constraints(x);

    std::vector<Eigen::Triplet<double>> trips;
    if (!p.jacobian_sparsity.empty()) {
        const auto color = color_columns(p.num_variables, p.jacobian_sparsity);
        const int num_colors = 1 + *std::max_element(color.begin(), color.end());
        std::vector<std::vector<std::pair<int, int>>> by_col(p.num_variables);
        for (const auto& [r, c] : p.jacobian_sparsity) by_col[c].push_back({r, c});

        Vector xp = x, xm = x;
        for (int k = 0; k < num_colors; ++k) {
            xp = x;
            xm = x;
            Vector h = Vector::Zero(p.num_variables);
            for (int j = 0; j < p.num_variables; ++j) {
                if (color[j] == k) {
                    h(j) = rel_step * (1.0 + std::abs(x(j)));
                    xp(j) += h(j);
                    xm(j) -= h(j);
                }
            }
            const Vector diff = p.constraints(xp) - p.constraints(xm);
            for (int j = 0; j < p.num_variables; ++j) {
                if (color[j] != k) continue;
                for (const auto& [r, c] : by_col[j]) {
                    trips.emplace_back(r, c, diff(r) / (2.0 * h(j)));
                }
            }
        }
    } else {
        Vector xp = x;
        for (int j = 0; j < p.num_variables; ++j) {
            const double h = rel_step * (1.0 + std::abs(x(j)));
            xp(j) = x(j) + h;
            const Vector cp = p.constraints(xp);
            xp(j) = x(j) - h;
            const Vector cm = p.constraints(xp);
            xp(j) = x(j);
            for (int r = 0; r < p.num_constraints; ++r) {
                const double d = (cp(r) - cm(r)) / (2.0 * h);
                if (d != 0.0) trips.emplace_back(r, j, d);
            }
        }
    }
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

namespace {

struct Workspace {
    const NlpProblem& p;
    const SolverConfig& cfg;

    double objective(const Vector& x) const { return p.objective(x); }
    Vector gradient(const Vector& x) const {
        return p.objective_gradient ? p.objective_gradient(x)
                                    : fd_objective_gradient(p, x, cfg.fd_relative_step);
    }
    Vector constraints(const Vector& x) const {
        return p.num_constraints > 0 ? p.constraints(x) : Vector();
    }
    SparseMatrix jacobian(const Vector& x) const {
        if (p.num_constraints == 0) return SparseMatrix(0, p.num_variables);
        return p.constraint_jacobian ? p.constraint_jacobian(x)
                                     : fd_constraint_jacobian(p, x, cfg.fd_relative_step);
    }
};

double augmented_lagrangian(double f, const Vector& c, const Vector& lambda, double rho) {
    if (c.size() == 0) return f;
    return f + lambda.dot(c) + 0.5 * rho * c.squaredNorm();
}

double projected_gradient_norm(const Vector& x, const Vector& g, const Vector& lo,
                               const Vector& hi) {
    double nrm = 0.0;
    for (int i = 0; i < x.size(); ++i) {
        const double step = x(i) - std::clamp(x(i) - g(i), lo(i), hi(i));
        nrm = std::max(nrm, std::abs(step));
    }
    return nrm;
}

// Minimizes the augmented Lagrangian over the box by damped projected
// Gauss-Newton steps: H = hess(f) + rho J^T J + nu I on the free
// variables, Armijo backtracking along the projected path.
struct InnerResult {
    int iterations = 0;
    bool nonfinite = false;
    double pg_norm = 0.0;
};

InnerResult inner_minimize(const Workspace& ws, Vector& x, const Vector& lambda,
                           double rho, double inner_tol, double& nu) {
    const NlpProblem& p = ws.p;
    const SolverConfig& cfg = ws.cfg;
    const int n = p.num_variables;

    InnerResult res;
    double f = ws.objective(x);
    Vector c = ws.constraints(x);
    if (!std::isfinite(f) || (c.size() > 0 && !c.allFinite())) {
        res.nonfinite = true;
        return res;
    }
    double phi = augmented_lagrangian(f, c, lambda, rho);

    for (int it = 0; it < cfg.max_inner_iterations; ++it) {
        const SparseMatrix J = ws.jacobian(x);
        Vector g = ws.gradient(x);
        if (c.size() > 0) g += J.transpose() * (lambda + rho * c);

        res.pg_norm = projected_gradient_norm(x, g, p.lower, p.upper);
        if (res.pg_norm <= inner_tol) break;

        // Free set: variables not pinned and not pressed against an active bound.
        std::vector<int> free_idx;
        std::vector<int> col_map(n, -1);
        for (int i = 0; i < n; ++i) {
            if (p.lower(i) == p.upper(i)) continue;
            const bool at_lo = x(i) <= p.lower(i) + 1e-14 * (1.0 + std::abs(p.lower(i)));
            const bool at_hi = x(i) >= p.upper(i) - 1e-14 * (1.0 + std::abs(p.upper(i)));
            if ((at_lo && g(i) > 0.0) || (at_hi && g(i) < 0.0)) continue;
            col_map[i] = static_cast<int>(free_idx.size());
            free_idx.push_back(i);
        }
        const int nf = static_cast<int>(free_idx.size());
        if (nf == 0) break;  // projected stationary point on the bounds

        // Constraint Jacobian restricted to the free columns.
        std::vector<Eigen::Triplet<double>> jtrips;
        for (int k = 0; k < J.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator jit(J, k); jit; ++jit) {
                const int cm = col_map[jit.col()];
                if (cm >= 0) jtrips.emplace_back(jit.row(), cm, jit.value());
            }
        }
        SparseMatrix Jf(p.num_constraints, nf);
        Jf.setFromTriplets(jtrips.begin(), jtrips.end());

        SparseMatrix H(nf, nf);
        if (p.num_constraints > 0) {
            H = rho * SparseMatrix(Jf.transpose() * Jf);
        }
        if (p.objective_hessian) {
            const SparseMatrix Hobj = p.objective_hessian(x);
            std::vector<Eigen::Triplet<double>> ht;
            for (int k = 0; k < Hobj.outerSize(); ++k) {
                for (SparseMatrix::InnerIterator hit(Hobj, k); hit; ++hit) {
                    const int rm = col_map[hit.row()];
                    const int cm2 = col_map[hit.col()];
                    if (rm >= 0 && cm2 >= 0) ht.emplace_back(rm, cm2, hit.value());
                }
            }
            SparseMatrix Hs(nf, nf);
            Hs.setFromTriplets(ht.begin(), ht.end());
            H += Hs;
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
            SparseMatrix Hd = H;
            SparseMatrix I(nf, nf);
            I.setIdentity();
            Hd += nu * I;

            Eigen::SimplicialLDLT<SparseMatrix> ldlt(Hd);
            if (ldlt.info() != Eigen::Success) {
                nu = std::max(nu * 10.0, 1e-10);
                continue;
            }
            Vector gf(nf);
            for (int i = 0; i < nf; ++i) gf(i) = g(free_idx[i]);
            const Vector pf = ldlt.solve(-gf);
            if (!pf.allFinite()) {
                nu = std::max(nu * 10.0, 1e-10);
                continue;
            }
            Vector pfull = Vector::Zero(n);
            for (int i = 0; i < nf; ++i) pfull(free_idx[i]) = pf(i);

            double alpha = 1.0;
            for (int ls = 0; ls < cfg.max_line_search_steps; ++ls) {
                const Vector xt = clamp_to_bounds(x + alpha * pfull, p.lower, p.upper);
                const Vector dx = xt - x;
                const double dirderiv = g.dot(dx);
                if (dirderiv >= 0.0 || dx.lpNorm<Eigen::Infinity>() == 0.0) break;
                const double ft = ws.objective(xt);
                const Vector ct = ws.constraints(xt);
                if (std::isfinite(ft) && (ct.size() == 0 || ct.allFinite())) {
                    const double phit = augmented_lagrangian(ft, ct, lambda, rho);
                    if (phit <= phi + cfg.armijo_slope * dirderiv) {
                        x = xt;
                        f = ft;
                        c = ct;
                        phi = phit;
                        stepped = true;
                        if (ls == 0) nu = std::max(nu / 3.0, 1e-12);
                        else if (ls > 3) nu *= 2.0;
                        break;
                    }
                }
                alpha *= cfg.line_search_shrink;
            }
            if (!stepped) nu = std::max(nu * 10.0, 1e-8);
        }
        ++res.iterations;
        if (!stepped) break;  // damping exhausted; return to outer loop
    }
    return res;
}

}  // namespace

std::pair<Vector, SolverReport> solve(const NlpProblem& problem, const Vector& x0,
                                      const SolverConfig& config) {
    problem.validate();
    if (x0.size() != problem.num_variables) {
        throw std::invalid_argument("solve: x0 dimension mismatch");
    }

    Workspace ws{problem, config};
    SolverReport report;

    Vector x = clamp_to_bounds(x0, problem.lower, problem.upper);
    report.x0_clamped = (x - x0).lpNorm<Eigen::Infinity>() > 0.0;

    Vector lambda = Vector::Zero(problem.num_constraints);
    double rho = problem.num_constraints > 0 ? config.penalty_initial : 0.0;
    double nu = 1e-4;
    double best_viol = std::numeric_limits<double>::infinity();

    for (int outer = 0; outer < config.max_outer_iterations; ++outer) {
        ++report.iterations;
        const InnerResult inner =
            inner_minimize(ws, x, lambda, rho, config.stationarity_tol, nu);
        report.inner_iterations += inner.iterations;
        if (inner.nonfinite) {
            report.status = SolverStatus::NumericalFailure;
            report.message = "non-finite evaluation at outer iteration " + std::to_string(outer);
            return {x, report};
        }

        const Vector c = ws.constraints(x);
        const double viol = c.size() > 0 ? c.lpNorm<Eigen::Infinity>() : 0.0;
        report.violation_history.push_back(viol);

        // Post-hoc stationarity with the first-order multiplier estimate.
        const Vector lambda_new =
            c.size() > 0 ? Vector(lambda + rho * c) : Vector();
        Vector gl = ws.gradient(x);
        if (c.size() > 0) gl += ws.jacobian(x).transpose() * lambda_new;
        const double stat = projected_gradient_norm(x, gl, problem.lower, problem.upper);

        report.constraint_violation = viol;
        report.stationarity = stat;
        report.objective = ws.objective(x);
        if (config.verbose) {
            std::cerr << "outer " << outer << " viol " << viol << " stat " << stat
                      << " rho " << rho << " obj " << report.objective << "\n";
        }

        if (viol <= config.constraint_tol && stat <= config.stationarity_tol) {
            report.status = SolverStatus::Converged;
            if (c.size() > 0) lambda = lambda_new;
            return {x, report};
        }
        if (c.size() == 0) break;  // unconstrained: inner loop is the whole story

        if (viol <= std::max(config.constraint_tol, 0.25 * best_viol)) {
            lambda = lambda_new;
            best_viol = std::min(best_viol, viol);
        } else {
            lambda = lambda_new;
            rho = std::min(rho * config.penalty_growth, config.penalty_max);
        }

        // Infeasibility: penalty ceiling reached with plateaued violation.
        const auto& hist = report.violation_history;
        if (rho >= config.penalty_max && hist.size() >= 6) {
            const double old = hist[hist.size() - 6];
            if (old > 0.0 && (old - viol) / old < 1e-3 && viol > config.constraint_tol) {
                report.status = SolverStatus::Infeasible;
                report.message = "violation plateaued at penalty ceiling";
                return {x, report};
            }
        }
    }

    report.status = (report.constraint_violation <= config.constraint_tol &&
                     report.stationarity <= config.stationarity_tol)
                        ? SolverStatus::Converged
                        : SolverStatus::MaxIterations;
    return {x, report};
}

GradientCheckReport check_gradients(const NlpProblem& problem, const Vector& x) {
    problem.validate();
    GradientCheckReport rep;
    const double h = 1e-6;

    if (problem.objective_gradient) {
        const Vector ga = problem.objective_gradient(x);
        const Vector gn = fd_objective_gradient(problem, x, h);
        for (int i = 0; i < x.size(); ++i) {
            const double denom = std::max({1.0, std::abs(ga(i)), std::abs(gn(i))});
            rep.objective_max_rel = std::max(rep.objective_max_rel,
                                             std::abs(ga(i) - gn(i)) / denom);
        }
    }
    if (problem.constraint_jacobian && problem.num_constraints > 0) {
        const SparseMatrix Ja = problem.constraint_jacobian(x);
        NlpProblem fd_problem = problem;  // use the (possibly colored) FD path
        const SparseMatrix Jn = fd_constraint_jacobian(fd_problem, x, h);
        const Eigen::MatrixXd D = Eigen::MatrixXd(Ja) - Eigen::MatrixXd(Jn);
        const Eigen::MatrixXd Jad = Eigen::MatrixXd(Ja);
        const Eigen::MatrixXd Jnd = Eigen::MatrixXd(Jn);
        for (int i = 0; i < D.rows(); ++i) {
            for (int j = 0; j < D.cols(); ++j) {
                const double denom = std::max({1.0, std::abs(Jad(i, j)), std::abs(Jnd(i, j))});
                rep.jacobian_max_rel = std::max(rep.jacobian_max_rel,
                                                std::abs(D(i, j)) / denom);
            }
        }
    }
    rep.max_rel = std::max(rep.objective_max_rel, rep.jacobian_max_rel);
    return rep;
}

}  // namespace descent
