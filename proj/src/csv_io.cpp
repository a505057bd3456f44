#include "descent/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace descent {

std::string format_sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void TrajectoryTable::validate() const {
    const size_t n = t_s.size();
    for (const auto* col : {&r_m, &alt_m, &theta_rad, &phi_rad, &w_ms, &u_ms, &v_ms,
                            &m_kg, &T_N, &alpha_rad, &beta_rad}) {
        if (col->size() != n) throw IoError("TrajectoryTable: ragged columns");
    }
    for (size_t i = 1; i < n; ++i) {
        if (!(t_s[i] > t_s[i - 1])) throw IoError("TrajectoryTable: t_s not increasing");
    }
}

TrajectoryTable make_trajectory_table(const TrajectorySolution& sol,
                                      const MoonConstants& consts) {
    TrajectoryTable t;
    for (size_t k = 0; k < sol.states.size(); ++k) {
        const auto& s = sol.states[k];
        const auto& c = sol.controls[k];
        t.t_s.push_back(sol.times[k]);
        t.r_m.push_back(s.r);
        t.alt_m.push_back(s.r - consts.radius);
        t.theta_rad.push_back(s.theta);
        t.phi_rad.push_back(s.phi);
        t.w_ms.push_back(s.w);
        t.u_ms.push_back(s.u);
        t.v_ms.push_back(s.v);
        t.m_kg.push_back(s.m);
        t.T_N.push_back(c.T);
        t.alpha_rad.push_back(c.alpha);
        t.beta_rad.push_back(c.beta);
    }
    t.validate();
    return t;
}

TrajectorySolution solution_from_table(const TrajectoryTable& table) {
    table.validate();
    if (table.size() < 2) throw IoError("solution_from_table: need at least two rows");
    TrajectorySolution sol;
    for (size_t k = 0; k < table.size(); ++k) {
        sol.times.push_back(table.t_s[k]);
        sol.states.push_back(LanderState{table.r_m[k], table.theta_rad[k],
                                         table.phi_rad[k], table.w_ms[k], table.u_ms[k],
                                         table.v_ms[k], table.m_kg[k]});
        sol.controls.push_back(
            ThrustCommand{table.T_N[k], table.alpha_rad[k], table.beta_rad[k]});
    }
    sol.t_f = table.t_s.back();
    sol.final_mass = table.m_kg.back();
    sol.status = SolverStatus::Converged;  // provenance unknown; caller re-verifies
    return sol;
}

namespace {
constexpr const char* kTrajectoryHeader =
    "t_s,r_m,alt_m,theta_rad,phi_rad,w_ms,u_ms,v_ms,m_kg,T_N,alpha_rad,beta_rad";
}

void write_trajectory_table(const TrajectoryTable& table, const std::string& path) {
    table.validate();
    std::ostringstream out;
    out << kTrajectoryHeader << '\n';
    for (size_t k = 0; k < table.size(); ++k) {
        out << format_sig9(table.t_s[k]) << ',' << format_sig9(table.r_m[k]) << ','
            << format_sig9(table.alt_m[k]) << ',' << format_sig9(table.theta_rad[k]) << ','
            << format_sig9(table.phi_rad[k]) << ',' << format_sig9(table.w_ms[k]) << ','
            << format_sig9(table.u_ms[k]) << ',' << format_sig9(table.v_ms[k]) << ','
            << format_sig9(table.m_kg[k]) << ',' << format_sig9(table.T_N[k]) << ','
            << format_sig9(table.alpha_rad[k]) << ',' << format_sig9(table.beta_rad[k])
            << '\n';
    }
    write_text_file(path, out.str());
}

void write_trajectory(const TrajectorySolution& sol, const MoonConstants& consts,
                      const std::string& path) {
    write_trajectory_table(make_trajectory_table(sol, consts), path);
}

TrajectoryTable read_trajectory(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoryHeader) {
        throw IoError("read_trajectory: bad header in " + path);
    }
    TrajectoryTable t;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<double> vals;
        while (std::getline(ls, field, ',')) {
            try {
                vals.push_back(std::stod(field));
            } catch (const std::exception&) {
                throw IoError("read_trajectory: bad value at " + path + ":" +
                              std::to_string(lineno));
            }
        }
        if (vals.size() != 12) {
            throw IoError("read_trajectory: wrong column count at " + path + ":" +
                          std::to_string(lineno));
        }
        t.t_s.push_back(vals[0]);
        t.r_m.push_back(vals[1]);
        t.alt_m.push_back(vals[2]);
        t.theta_rad.push_back(vals[3]);
        t.phi_rad.push_back(vals[4]);
        t.w_ms.push_back(vals[5]);
        t.u_ms.push_back(vals[6]);
        t.v_ms.push_back(vals[7]);
        t.m_kg.push_back(vals[8]);
        t.T_N.push_back(vals[9]);
        t.alpha_rad.push_back(vals[10]);
        t.beta_rad.push_back(vals[11]);
    }
    t.validate();
    return t;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << content;
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace descent
