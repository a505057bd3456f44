#ifndef DESCENT_PLOTS_HPP
#define DESCENT_PLOTS_HPP

#include "descent/csv_io.hpp"
#include "descent/pareto_outer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace descent {

// Minimal deterministic SVG line plot.
std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<double>& xs,
                             const std::vector<double>& ys, int marker_index = -1);

// Surface-projected great-circle components relative to the first sample,
// positive downrange along the initial horizontal velocity direction.
void downrange_crossrange(const TrajectoryTable& table, double moon_radius,
                          std::vector<double>& downrange_m,
                          std::vector<double>& crossrange_m);

// One SVG per figure kind: altitude, vertical velocity, downrange,
// horizontal velocity, crossrange, pitch, and the Pareto curve. Returns
// the written file paths; throws on empty input.
std::vector<std::string> emit_plots(const TrajectoryTable* trajectory,
                                    const ParetoResult* pareto, double moon_radius,
                                    const std::string& out_dir);

}  // namespace descent

#endif
