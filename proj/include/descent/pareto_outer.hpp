#ifndef DESCENT_PARETO_OUTER_HPP
#define DESCENT_PARETO_OUTER_HPP

#include "descent/engine_models.hpp"
#include "descent/transcription.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace descent {

enum class SweepMode { EngineCount, MaxThrust };

// Outer design sweep: engine count (Case 1, discrete) or single-engine
// max thrust (Case 2, continuous grid).
struct SweepSpec {
    SweepMode mode = SweepMode::MaxThrust;
    std::vector<double> thrust_grid;  // N, MaxThrust mode
    std::vector<int> count_grid;      // EngineCount mode

    ScenarioSpec scenario;
    MoonConstants consts;
    QuadraticEngineModel quad_engine;     // MaxThrust mode
    ClusterEngineModel cluster_engine;    // EngineCount mode (n set per point)
    SolverConfig solver;

    bool warm_start = false;  // previous point's solution seeds the next guess
    int parallelism = 1;      // independent inner solves; output order-invariant

    void validate() const;
    static std::vector<double> linear_grid(double start, double stop, double step);
};

struct ParetoPoint {
    double t_max = 0.0;            // N
    int n = 1;                     // engine count (1 in MaxThrust mode)
    double isp_used = 0.0;         // s
    double engine_dry_mass = 0.0;  // kg
    double final_mass = 0.0;       // kg (0 when not converged)
    double effective_payload = 0.0;
    double thrust_to_mass0 = 0.0;  // m/s^2
    double t_f = 0.0;              // s
    SolverStatus status = SolverStatus::MaxIterations;
};

struct ParetoResult {
    std::vector<ParetoPoint> points;
    int maximizer_index = -1;          // among converged points; -1 if none
    bool boundary_maximizer = false;
    bool neighbor_failure = false;     // maximizer adjacent to a failed point

    const ParetoPoint* maximizer() const {
        return maximizer_index >= 0 ? &points[maximizer_index] : nullptr;
    }
};

struct InnerSolveOutcome {
    double final_mass = 0.0;
    double t_f = 0.0;
    SolverStatus status = SolverStatus::MaxIterations;
    Vector z;  // converged decision vector, for warm starting
};

// Inner solve hook: (engine, optional warm-start decision vector) ->
// outcome. Tests inject closed-form stubs here.
using InnerSolveFn =
    std::function<InnerSolveOutcome(const EngineCharacterization&, const Vector*)>;

// Default inner solver: transcribe + cold (or warm) start + solve.
InnerSolveFn make_inner_solver(const SweepSpec& spec);

// One ParetoPoint per grid entry; non-converged points carry status and
// are excluded from the argmax. Ties go to the smaller design. Output is
// identical regardless of parallelism.
ParetoResult sweep(const SweepSpec& spec);
ParetoResult sweep(const SweepSpec& spec, const InnerSolveFn& inner);

// Golden-section refinement around an interior MaxThrust maximizer.
// Appends the evaluated points; refuses boundary maximizers.
ParetoResult refine_maximum(const ParetoResult& result, const SweepSpec& spec,
                            int iterations);
ParetoResult refine_maximum(const ParetoResult& result, const SweepSpec& spec,
                            int iterations, const InnerSolveFn& inner);

// Pareto CSV schema: header plus one row per point, floats at 9
// significant digits. Lossless round trip with pareto_from_csv.
std::vector<std::string> tabulate(const ParetoResult& result);
std::string pareto_to_csv(const ParetoResult& result);
ParetoResult pareto_from_csv(const std::string& text);

}  // namespace descent

#endif
