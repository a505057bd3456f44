#ifndef DESCENT_RUN_CONFIG_HPP
#define DESCENT_RUN_CONFIG_HPP

#include "descent/engine_models.hpp"
#include "descent/nlp_core.hpp"
#include "descent/pareto_outer.hpp"
#include "descent/transcription.hpp"

#include <string>

namespace descent {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Engine section: exactly one case active.
struct EngineConfig {
    int engine_case = 2;
    ClusterEngineModel cluster;   // case 1
    QuadraticEngineModel quad;    // case 2
    double t_max = 12000.0;       // N, single-solve design thrust for case 2

    // Resolved triple for a single inner solve.
    EngineCharacterization resolve() const;
};

struct SweepConfig {
    SweepMode mode = SweepMode::MaxThrust;
    double t_start = 4000.0;   // N
    double t_stop = 32000.0;   // N
    double t_step = 2000.0;    // N
    int n_start = 5;
    int n_stop = 30;
    bool warm_start = false;
    int refine_iterations = 20;
};

struct OutputConfig {
    std::string directory = "out";
    bool plots = true;
};

// Full run configuration; every absent key takes its documented default.
struct RunConfig {
    MoonConstants constants;
    ScenarioSpec scenario;
    EngineConfig engine;
    SolverConfig solver;
    SweepConfig sweep;
    OutputConfig output;

    SweepSpec make_sweep_spec(SweepMode mode, int parallelism) const;
};

// Strict parser for the documented INI-style format: [section] headers,
// key = value lines, '#' comments. Unknown sections or keys are rejected;
// errors carry line information.
RunConfig load_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

// The default configuration document (all defaults spelled out).
std::string default_config_text();

}  // namespace descent

#endif
