#include "descent/pareto_outer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>

namespace descent {

void SweepSpec::validate() const {
    const auto check_increasing = [](const auto& grid) {
        for (size_t i = 1; i < grid.size(); ++i) {
            if (!(grid[i] > grid[i - 1])) return false;
        }
        return true;
    };
    if (mode == SweepMode::MaxThrust) {
        if (thrust_grid.empty()) throw std::invalid_argument("SweepSpec: empty thrust grid");
        if (!check_increasing(thrust_grid) || thrust_grid.front() <= 0.0) {
            throw std::invalid_argument("SweepSpec: thrust grid must be positive, strictly increasing");
        }
        quad_engine.validate();
    } else {
        if (count_grid.empty()) throw std::invalid_argument("SweepSpec: empty count grid");
        if (!check_increasing(count_grid) || count_grid.front() < 1) {
            throw std::invalid_argument("SweepSpec: count grid must be >= 1, strictly increasing");
        }
        cluster_engine.validate();
    }
    if (parallelism < 1) throw std::invalid_argument("SweepSpec: parallelism must be >= 1");
}

std::vector<double> SweepSpec::linear_grid(double start, double stop, double step) {
    if (step <= 0.0 || stop < start) throw std::invalid_argument("linear_grid: bad range");
    std::vector<double> g;
    for (double t = start; t <= stop + 1e-9 * step; t += step) g.push_back(t);
    return g;
}

namespace {

EngineCharacterization engine_for(const SweepSpec& spec, size_t idx) {
    if (spec.mode == SweepMode::MaxThrust) {
        return resolve_quadratic(spec.quad_engine, spec.thrust_grid[idx]);
    }
    ClusterEngineModel cluster = spec.cluster_engine;
    cluster.n = spec.count_grid[idx];
    return resolve_cluster(cluster);
}

ParetoPoint make_point(const SweepSpec& spec, const EngineCharacterization& eng, int n,
                       const InnerSolveOutcome& out) {
    ParetoPoint pt;
    pt.t_max = eng.max_thrust;
    pt.n = n;
    pt.isp_used = eng.isp;
    pt.engine_dry_mass = eng.dry_mass;
    pt.final_mass = out.final_mass;
    pt.effective_payload = out.final_mass - eng.dry_mass;
    pt.thrust_to_mass0 = eng.max_thrust / spec.scenario.m0;
    pt.t_f = out.t_f;
    pt.status = out.status;
    return pt;
}

// Argmax over converged points; ties go to the earlier (smaller) design.
void select_maximizer(ParetoResult& result, size_t grid_size) {
    result.maximizer_index = -1;
    for (size_t i = 0; i < result.points.size(); ++i) {
        const auto& pt = result.points[i];
        if (pt.status != SolverStatus::Converged) continue;
        if (result.maximizer_index < 0 ||
            pt.effective_payload > result.points[result.maximizer_index].effective_payload) {
            result.maximizer_index = static_cast<int>(i);
        }
    }
    result.boundary_maximizer = false;
    result.neighbor_failure = false;
    if (result.maximizer_index >= 0 && result.maximizer_index < static_cast<int>(grid_size)) {
        const int i = result.maximizer_index;
        result.boundary_maximizer = (i == 0 || i + 1 == static_cast<int>(grid_size));
        if (i > 0 && result.points[i - 1].status != SolverStatus::Converged) {
            result.neighbor_failure = true;
        }
        if (i + 1 < static_cast<int>(grid_size) &&
            result.points[i + 1].status != SolverStatus::Converged) {
            result.neighbor_failure = true;
        }
    }
}

std::string format_sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

InnerSolveFn make_inner_solver(const SweepSpec& spec) {
    return [spec](const EngineCharacterization& eng, const Vector* warm) {
        const TranscribedProblem p = transcribe(spec.scenario, eng, spec.consts);
        const Vector z0 =
            (warm && warm->size() == p.dimension) ? *warm : initial_guess(p);
        auto [z, report] = solve(p.to_nlp(), z0, spec.solver);
        InnerSolveOutcome out;
        out.final_mass = p.state_at(z, p.nodes - 1).m;
        out.t_f = p.final_time(z);
        out.status = report.status;
        out.z = std::move(z);
        return out;
    };
}

ParetoResult sweep(const SweepSpec& spec) { return sweep(spec, make_inner_solver(spec)); }

ParetoResult sweep(const SweepSpec& spec, const InnerSolveFn& inner) {
    spec.validate();
    const size_t npts = spec.mode == SweepMode::MaxThrust ? spec.thrust_grid.size()
                                                          : spec.count_grid.size();
    ParetoResult result;
    result.points.resize(npts);

    auto solve_point = [&](size_t i, const Vector* warm) {
        const EngineCharacterization eng = engine_for(spec, i);
        const int n = spec.mode == SweepMode::EngineCount ? spec.count_grid[i] : 1;
        result.points[i] = make_point(spec, eng, n, inner(eng, warm));
    };

    if (spec.warm_start || spec.parallelism == 1 || npts == 1) {
        Vector warm;
        for (size_t i = 0; i < npts; ++i) {
            const EngineCharacterization eng = engine_for(spec, i);
            const int n = spec.mode == SweepMode::EngineCount ? spec.count_grid[i] : 1;
            const Vector* warm_ptr =
                (spec.warm_start && warm.size() > 0) ? &warm : nullptr;
            const InnerSolveOutcome out = inner(eng, warm_ptr);
            if (spec.warm_start && out.status == SolverStatus::Converged) warm = out.z;
            result.points[i] = make_point(spec, eng, n, out);
        }
    } else {
        std::atomic<size_t> next{0};
        const int workers = std::min<int>(spec.parallelism, static_cast<int>(npts));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (size_t i = next.fetch_add(1); i < npts; i = next.fetch_add(1)) {
                    solve_point(i, nullptr);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    select_maximizer(result, npts);
    if (result.maximizer_index < 0) {
        std::ostringstream oss;
        oss << "sweep: no grid point converged;";
        for (const auto& pt : result.points) {
            oss << " [t_max=" << pt.t_max << " n=" << pt.n << " status="
                << to_string(pt.status) << "]";
        }
        throw std::runtime_error(oss.str());
    }
    return result;
}

ParetoResult refine_maximum(const ParetoResult& result, const SweepSpec& spec,
                            int iterations) {
    return refine_maximum(result, spec, iterations, make_inner_solver(spec));
}

ParetoResult refine_maximum(const ParetoResult& result, const SweepSpec& spec,
                            int iterations, const InnerSolveFn& inner) {
    if (spec.mode != SweepMode::MaxThrust) {
        throw std::invalid_argument("refine_maximum: requires max_thrust mode");
    }
    if (result.maximizer_index < 0) {
        throw std::invalid_argument("refine_maximum: no converged maximizer");
    }
    if (result.boundary_maximizer) {
        throw std::runtime_error(
            "refine_maximum: maximizer on the grid boundary; extend the grid instead");
    }
    ParetoResult refined = result;
    if (iterations <= 0) return refined;

    const size_t grid_size = spec.thrust_grid.size();
    const int im = result.maximizer_index;
    if (im <= 0 || im + 1 >= static_cast<int>(grid_size)) {
        throw std::runtime_error("refine_maximum: maximizer bracket not interior");
    }

    double a = spec.thrust_grid[im - 1];
    double b = spec.thrust_grid[im + 1];
    const double spacing = spec.thrust_grid[im] - spec.thrust_grid[im - 1];
    const double target_width = 0.01 * spacing;
    const double gr = (1.0 + std::sqrt(5.0)) / 2.0;

    int budget = iterations;
    auto evaluate = [&](double t_max) {
        const EngineCharacterization eng = resolve_quadratic(spec.quad_engine, t_max);
        const ParetoPoint pt = make_point(spec, eng, 1, inner(eng, nullptr));
        refined.points.push_back(pt);
        --budget;
        return pt.status == SolverStatus::Converged
                   ? pt.effective_payload
                   : -std::numeric_limits<double>::infinity();
    };

    double c = b - (b - a) / gr;
    double d = a + (b - a) / gr;
    double fc = evaluate(c);
    double fd = budget > 0 ? evaluate(d) : -std::numeric_limits<double>::infinity();
    while (budget > 0 && (b - a) > target_width) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) / gr;
            fc = evaluate(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) / gr;
            fd = evaluate(d);
        }
    }

    select_maximizer(refined, grid_size);
    return refined;
}

std::vector<std::string> tabulate(const ParetoResult& result) {
    std::vector<std::string> rows;
    rows.push_back(
        "t_max_N,n_engines,isp_s,engine_mass_kg,final_mass_kg,effective_payload_kg,"
        "thrust_to_mass0_ms2,t_f_s,status,is_maximizer");
    for (size_t i = 0; i < result.points.size(); ++i) {
        const auto& pt = result.points[i];
        std::ostringstream oss;
        oss << format_sig9(pt.t_max) << ',' << pt.n << ',' << format_sig9(pt.isp_used)
            << ',' << format_sig9(pt.engine_dry_mass) << ',' << format_sig9(pt.final_mass)
            << ',' << format_sig9(pt.effective_payload) << ','
            << format_sig9(pt.thrust_to_mass0) << ',' << format_sig9(pt.t_f) << ','
            << to_string(pt.status) << ','
            << (static_cast<int>(i) == result.maximizer_index ? 1 : 0);
        rows.push_back(oss.str());
    }
    return rows;
}

std::string pareto_to_csv(const ParetoResult& result) {
    std::string out;
    for (const auto& row : tabulate(result)) {
        out += row;
        out += '\n';
    }
    return out;
}

ParetoResult pareto_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("pareto_from_csv: empty input");
    if (line.rfind("t_max_N,", 0) != 0) {
        throw std::runtime_error("pareto_from_csv: unexpected header: " + line);
    }
    ParetoResult result;
    int idx = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 10) {
            throw std::runtime_error("pareto_from_csv: bad row: " + line);
        }
        ParetoPoint pt;
        pt.t_max = std::stod(fields[0]);
        pt.n = std::stoi(fields[1]);
        pt.isp_used = std::stod(fields[2]);
        pt.engine_dry_mass = std::stod(fields[3]);
        pt.final_mass = std::stod(fields[4]);
        pt.effective_payload = std::stod(fields[5]);
        pt.thrust_to_mass0 = std::stod(fields[6]);
        pt.t_f = std::stod(fields[7]);
        if (fields[8] == "converged") pt.status = SolverStatus::Converged;
        else if (fields[8] == "max_iterations") pt.status = SolverStatus::MaxIterations;
        else if (fields[8] == "infeasible") pt.status = SolverStatus::Infeasible;
        else if (fields[8] == "numerical_failure") pt.status = SolverStatus::NumericalFailure;
        else throw std::runtime_error("pareto_from_csv: bad status: " + fields[8]);
        if (fields[9] == "1") result.maximizer_index = idx;
        result.points.push_back(pt);
        ++idx;
    }
    return result;
}

}  // namespace descent
