#include "descent/run_config.hpp"

#include "descent/csv_io.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace descent {

EngineCharacterization EngineConfig::resolve() const {
    if (engine_case == 1) return resolve_cluster(cluster);
    return resolve_quadratic(quad, t_max);
}

SweepSpec RunConfig::make_sweep_spec(SweepMode mode, int parallelism) const {
    SweepSpec spec;
    spec.mode = mode;
    if (mode == SweepMode::MaxThrust) {
        spec.thrust_grid = SweepSpec::linear_grid(sweep.t_start, sweep.t_stop, sweep.t_step);
        spec.quad_engine = engine.quad;
    } else {
        for (int n = sweep.n_start; n <= sweep.n_stop; ++n) spec.count_grid.push_back(n);
        spec.cluster_engine = engine.cluster;
    }
    spec.scenario = scenario;
    spec.consts = constants;
    spec.solver = solver;
    spec.warm_start = sweep.warm_start;
    spec.parallelism = parallelism;
    return spec;
}

namespace {

struct Entry {
    std::string value;
    int line;
};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Parser {
    std::map<std::string, std::map<std::string, Entry>> sections;

    static Parser parse(const std::string& text) {
        Parser p;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const size_t hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') {
                    throw ConfigError("line " + std::to_string(lineno) +
                                      ": malformed section header");
                }
                section = trim(line.substr(1, line.size() - 2));
                if (section.empty()) {
                    throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
                }
                p.sections[section];  // section may legitimately stay empty
                continue;
            }
            const size_t eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
            }
            if (section.empty()) {
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": key outside any [section]");
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty() || value.empty()) {
                throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
            }
            if (p.sections[section].count(key)) {
                throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                                  key + "' in [" + section + "]");
            }
            p.sections[section][key] = Entry{value, lineno};
        }
        return p;
    }
};

double to_double(const std::string& section, const std::string& key, const Entry& e) {
    try {
        size_t pos = 0;
        const double v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(e.line) + ": [" + section + "] " + key +
                          ": expected a number, got '" + e.value + "'");
    }
}

int to_int(const std::string& section, const std::string& key, const Entry& e) {
    const double v = to_double(section, key, e);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) {
        throw ConfigError("line " + std::to_string(e.line) + ": [" + section + "] " + key +
                          ": expected an integer");
    }
    return i;
}

bool to_bool(const std::string& section, const std::string& key, const Entry& e) {
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ConfigError("line " + std::to_string(e.line) + ": [" + section + "] " + key +
                      ": expected true/false");
}

}  // namespace

RunConfig load_config(const std::string& text) {
    const Parser p = Parser::parse(text);
    RunConfig cfg;

    const std::set<std::string> known_sections = {"constants", "scenario", "engine",
                                                  "solver",    "sweep",    "output"};
    for (const auto& [sec, _] : p.sections) {
        if (!known_sections.count(sec)) {
            throw ConfigError("unknown section [" + sec + "]");
        }
    }

    auto section = [&](const char* name) -> const std::map<std::string, Entry>* {
        auto it = p.sections.find(name);
        return it == p.sections.end() ? nullptr : &it->second;
    };
    auto unknown = [&](const std::string& sec, const std::string& key, int line) {
        throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key +
                          "' in [" + sec + "]");
    };

    if (const auto* s = section("constants")) {
        for (const auto& [key, e] : *s) {
            if (key == "mu") cfg.constants.mu = to_double("constants", key, e);
            else if (key == "omega") cfg.constants.omega = to_double("constants", key, e);
            else if (key == "radius") cfg.constants.radius = to_double("constants", key, e);
            else if (key == "g0") cfg.constants.g0 = to_double("constants", key, e);
            else if (key == "flat_gravity") cfg.constants.flat_gravity = to_bool("constants", key, e);
            else unknown("constants", key, e.line);
        }
    }
    cfg.constants.validate();
    const double sg = cfg.constants.surface_gravity();
    if (sg < 1.60 || sg > 1.65) {
        // custom bodies are allowed, but the defaults must stay lunar
        if (cfg.constants.mu == MoonConstants{}.mu &&
            cfg.constants.radius == MoonConstants{}.radius) {
            throw ConfigError("constants: default surface gravity outside [1.60, 1.65]");
        }
    }

    double initial_altitude = 30000.0;
    double final_altitude = 800.0;
    if (const auto* s = section("scenario")) {
        for (const auto& [key, e] : *s) {
            if (key == "m0") cfg.scenario.m0 = to_double("scenario", key, e);
            else if (key == "initial_altitude") initial_altitude = to_double("scenario", key, e);
            else if (key == "final_altitude") final_altitude = to_double("scenario", key, e);
            else if (key == "w0") cfg.scenario.w0 = to_double("scenario", key, e);
            else if (key == "u0") cfg.scenario.u0 = to_double("scenario", key, e);
            else if (key == "v0") cfg.scenario.v0 = to_double("scenario", key, e);
            else if (key == "theta_f") cfg.scenario.theta_f = to_double("scenario", key, e);
            else if (key == "phi_f") cfg.scenario.phi_f = to_double("scenario", key, e);
            else if (key == "theta0_free") cfg.scenario.theta0_free = to_bool("scenario", key, e);
            else if (key == "phi0_free") cfg.scenario.phi0_free = to_bool("scenario", key, e);
            else if (key == "theta0") cfg.scenario.theta0 = to_double("scenario", key, e);
            else if (key == "phi0") cfg.scenario.phi0 = to_double("scenario", key, e);
            else if (key == "t_min") cfg.scenario.t_min = to_double("scenario", key, e);
            else if (key == "alpha_max") cfg.scenario.alpha_max = to_double("scenario", key, e);
            else if (key == "beta_max") cfg.scenario.beta_max = to_double("scenario", key, e);
            else if (key == "planar") cfg.scenario.planar_mode = to_bool("scenario", key, e);
            else if (key == "nodes") cfg.scenario.nodes = to_int("scenario", key, e);
            else if (key == "t_f_low") cfg.scenario.t_f_low = to_double("scenario", key, e);
            else if (key == "t_f_high") cfg.scenario.t_f_high = to_double("scenario", key, e);
            else if (key == "scheme") {
                if (e.value == "hermite_simpson") {
                    cfg.scenario.scheme = CollocationScheme::HermiteSimpson;
                } else if (e.value == "trapezoidal") {
                    cfg.scenario.scheme = CollocationScheme::Trapezoidal;
                } else {
                    throw ConfigError("line " + std::to_string(e.line) +
                                      ": scheme must be hermite_simpson or trapezoidal");
                }
            } else unknown("scenario", key, e.line);
        }
    }
    cfg.scenario.r0 = cfg.constants.radius + initial_altitude;
    cfg.scenario.r_f = cfg.constants.radius + final_altitude;

    if (const auto* s = section("engine")) {
        std::set<std::string> case1_keys, case2_keys;
        for (const auto& [key, e] : *s) {
            if (key == "case") cfg.engine.engine_case = to_int("engine", key, e);
            else if (key == "n") { cfg.engine.cluster.n = to_int("engine", key, e); case1_keys.insert(key); }
            else if (key == "per_engine_max_thrust") { cfg.engine.cluster.per_engine_max_thrust = to_double("engine", key, e); case1_keys.insert(key); }
            else if (key == "per_engine_isp") { cfg.engine.cluster.per_engine_isp = to_double("engine", key, e); case1_keys.insert(key); }
            else if (key == "per_engine_dry_mass") { cfg.engine.cluster.per_engine_dry_mass = to_double("engine", key, e); case1_keys.insert(key); }
            else if (key == "m0_eng") { cfg.engine.quad.m0_eng = to_double("engine", key, e); case2_keys.insert(key); }
            else if (key == "c1") { cfg.engine.quad.c1 = to_double("engine", key, e); case2_keys.insert(key); }
            else if (key == "c2") { cfg.engine.quad.c2 = to_double("engine", key, e); case2_keys.insert(key); }
            else if (key == "isp0") { cfg.engine.quad.isp0 = to_double("engine", key, e); case2_keys.insert(key); }
            else if (key == "d1") { cfg.engine.quad.d1 = to_double("engine", key, e); case2_keys.insert(key); }
            else if (key == "d2") { cfg.engine.quad.d2 = to_double("engine", key, e); case2_keys.insert(key); }
            else if (key == "thrust_low") { cfg.engine.quad.thrust_low = to_double("engine", key, e); case2_keys.insert(key); }
            else if (key == "thrust_high") { cfg.engine.quad.thrust_high = to_double("engine", key, e); case2_keys.insert(key); }
            else if (key == "t_max") { cfg.engine.t_max = to_double("engine", key, e); case2_keys.insert(key); }
            else unknown("engine", key, e.line);
        }
        if (cfg.engine.engine_case != 1 && cfg.engine.engine_case != 2) {
            throw ConfigError("[engine] case must be 1 or 2");
        }
        if (cfg.engine.engine_case == 1 && !case2_keys.empty()) {
            throw ConfigError("[engine] case 1 selected but case-2 key '" +
                              *case2_keys.begin() + "' present");
        }
        if (cfg.engine.engine_case == 2 && !case1_keys.empty()) {
            throw ConfigError("[engine] case 2 selected but case-1 key '" +
                              *case1_keys.begin() + "' present");
        }
    }

    if (const auto* s = section("solver")) {
        for (const auto& [key, e] : *s) {
            if (key == "max_outer_iterations") cfg.solver.max_outer_iterations = to_int("solver", key, e);
            else if (key == "max_inner_iterations") cfg.solver.max_inner_iterations = to_int("solver", key, e);
            else if (key == "penalty_initial") cfg.solver.penalty_initial = to_double("solver", key, e);
            else if (key == "penalty_growth") cfg.solver.penalty_growth = to_double("solver", key, e);
            else if (key == "penalty_max") cfg.solver.penalty_max = to_double("solver", key, e);
            else if (key == "constraint_tol") cfg.solver.constraint_tol = to_double("solver", key, e);
            else if (key == "stationarity_tol") cfg.solver.stationarity_tol = to_double("solver", key, e);
            else if (key == "fd_relative_step") cfg.solver.fd_relative_step = to_double("solver", key, e);
            else if (key == "verbose") cfg.solver.verbose = to_bool("solver", key, e);
            else unknown("solver", key, e.line);
        }
        if (cfg.solver.constraint_tol <= 0.0 || cfg.solver.stationarity_tol <= 0.0 ||
            cfg.solver.penalty_growth <= 1.0) {
            throw ConfigError("[solver] tolerances must be > 0 and penalty_growth > 1");
        }
    }

    if (const auto* s = section("sweep")) {
        for (const auto& [key, e] : *s) {
            if (key == "mode") {
                if (e.value == "max_thrust") cfg.sweep.mode = SweepMode::MaxThrust;
                else if (e.value == "engine_count") cfg.sweep.mode = SweepMode::EngineCount;
                else throw ConfigError("line " + std::to_string(e.line) +
                                       ": sweep mode must be max_thrust or engine_count");
            }
            else if (key == "t_start") cfg.sweep.t_start = to_double("sweep", key, e);
            else if (key == "t_stop") cfg.sweep.t_stop = to_double("sweep", key, e);
            else if (key == "t_step") cfg.sweep.t_step = to_double("sweep", key, e);
            else if (key == "n_start") cfg.sweep.n_start = to_int("sweep", key, e);
            else if (key == "n_stop") cfg.sweep.n_stop = to_int("sweep", key, e);
            else if (key == "warm_start") cfg.sweep.warm_start = to_bool("sweep", key, e);
            else if (key == "refine_iterations") cfg.sweep.refine_iterations = to_int("sweep", key, e);
            else unknown("sweep", key, e.line);
        }
    }

    if (const auto* s = section("output")) {
        for (const auto& [key, e] : *s) {
            if (key == "directory") cfg.output.directory = e.value;
            else if (key == "plots") cfg.output.plots = to_bool("output", key, e);
            else unknown("output", key, e.line);
        }
    }

    try {
        cfg.scenario.validate(cfg.constants);
        if (cfg.engine.engine_case == 1) cfg.engine.cluster.validate();
        else cfg.engine.quad.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("validation: ") + e.what());
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    if (path.empty() || path == "default") return load_config("");
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const IoError& e) {
        throw;  // caller maps to the I/O exit code
    }
    return load_config(text);
}

std::string default_config_text() {
    return R"(# Default configuration (all values are the built-in defaults).
[constants]
mu = 4.9028e12
omega = 2.6617e-6
radius = 1.7374e6
g0 = 9.81
flat_gravity = false

[scenario]
m0 = 4000
initial_altitude = 30000
final_altitude = 800
w0 = 0
u0 = 1688
v0 = 0
theta_f = 0
phi_f = 0
theta0_free = true
phi0_free = true
t_min = 0
alpha_max = 3.14159265358979
beta_max = 1.5707963267949
planar = false
nodes = 60
t_f_low = 50
t_f_high = 2000
scheme = hermite_simpson

[engine]
case = 2
m0_eng = 2.229
c1 = 0.006288
c2 = -7.109e-8
isp0 = 311.3
d1 = -0.0005976
d2 = 4.755e-9
thrust_low = 0
thrust_high = 40000
t_max = 12000

[solver]
max_outer_iterations = 50
max_inner_iterations = 200
penalty_initial = 10
penalty_growth = 10
penalty_max = 1e12
constraint_tol = 1e-6
stationarity_tol = 1e-6

[sweep]
mode = max_thrust
t_start = 4000
t_stop = 32000
t_step = 2000
n_start = 5
n_stop = 30
warm_start = false
refine_iterations = 20

[output]
directory = out
plots = true
)";
}

}  // namespace descent
