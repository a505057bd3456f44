#ifndef DESCENT_CSV_IO_HPP
#define DESCENT_CSV_IO_HPP

#include "descent/moon_dynamics.hpp"
#include "descent/transcription.hpp"

#include <string>
#include <vector>

namespace descent {

// %.9g text form used everywhere floats hit disk.
std::string format_sig9(double v);

// Per-node trajectory rows as persisted to CSV.
struct TrajectoryTable {
    std::vector<double> t_s, r_m, alt_m, theta_rad, phi_rad;
    std::vector<double> w_ms, u_ms, v_ms, m_kg;
    std::vector<double> T_N, alpha_rad, beta_rad;

    size_t size() const { return t_s.size(); }
    void validate() const;  // strictly increasing t_s, consistent lengths
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

TrajectoryTable make_trajectory_table(const TrajectorySolution& sol,
                                      const MoonConstants& consts);

// Reconstructs node states/controls from a table; times come back in
// sol.times, moon radius is re-derived as r_m - alt_m.
TrajectorySolution solution_from_table(const TrajectoryTable& table);

void write_trajectory(const TrajectorySolution& sol, const MoonConstants& consts,
                      const std::string& path);
void write_trajectory_table(const TrajectoryTable& table, const std::string& path);
TrajectoryTable read_trajectory(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace descent

#endif
