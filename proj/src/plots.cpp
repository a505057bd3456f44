#include "descent/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace descent {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo, hi;
    static Range of(const std::vector<double>& v) {
        double lo = v.front(), hi = v.front();
        for (double x : v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            const double pad = std::max(1.0, std::abs(hi)) * 0.05;
            lo -= pad;
            hi += pad;
        }
        return Range{lo, hi};
    }
};

}  // namespace

std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<double>& xs,
                             const std::vector<double>& ys, int marker_index) {
    if (xs.empty() || xs.size() != ys.size()) {
        throw std::invalid_argument("render_line_plot: empty or mismatched series");
    }
    const double W = 720, H = 480, L = 80, R = 20, T = 40, B = 55;
    const Range xr = Range::of(xs), yr = Range::of(ys);
    auto px = [&](double x) { return L + (x - xr.lo) / (xr.hi - xr.lo) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - yr.lo) / (yr.hi - yr.lo) * (H - T - B); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\""
      << " text-anchor=\"middle\">" << title << "</text>\n";

    // axes
    s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
      << H - B << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
      << "\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 5; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / 5.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / 5.0;
        const double X = px(fx), Y = py(fy);
        s << "<line x1=\"" << X << "\" y1=\"" << H - B << "\" x2=\"" << X << "\" y2=\""
          << H - B + 5 << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << X << "\" y=\"" << H - B + 20
          << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
          << fmt(fx) << "</text>\n"
          << "<line x1=\"" << L - 5 << "\" y1=\"" << Y << "\" x2=\"" << L << "\" y2=\"" << Y
          << "\" stroke=\"black\"/>\n"
          << "<text x=\"" << L - 8 << "\" y=\"" << Y + 4
          << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(fy)
          << "</text>\n";
    }
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">" << x_label
      << "</text>\n"
      << "<text x=\"18\" y=\"" << (T + H - B) / 2
      << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\""
      << " transform=\"rotate(-90 18 " << (T + H - B) / 2 << ")\">" << y_label
      << "</text>\n";

    if (xs.size() == 1) {
        s << "<circle cx=\"" << px(xs[0]) << "\" cy=\"" << py(ys[0])
          << "\" r=\"4\" fill=\"steelblue\"/>\n";
    } else {
        s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < xs.size(); ++i) {
            s << fmt(px(xs[i])) << ',' << fmt(py(ys[i])) << (i + 1 < xs.size() ? " " : "");
        }
        s << "\"/>\n";
    }
    if (marker_index >= 0 && marker_index < static_cast<int>(xs.size())) {
        s << "<circle cx=\"" << px(xs[marker_index]) << "\" cy=\"" << py(ys[marker_index])
          << "\" r=\"5\" fill=\"none\" stroke=\"crimson\" stroke-width=\"2\"/>\n"
          << "<text x=\"" << px(xs[marker_index]) << "\" y=\"" << py(ys[marker_index]) - 10
          << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\""
          << " fill=\"crimson\">max</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

void downrange_crossrange(const TrajectoryTable& table, double moon_radius,
                          std::vector<double>& downrange_m,
                          std::vector<double>& crossrange_m) {
    table.validate();
    if (table.size() == 0) throw std::invalid_argument("downrange_crossrange: empty table");
    const double theta0 = table.theta_rad[0];
    const double phi0 = table.phi_rad[0];
    double ex = table.u_ms[0], ey = table.v_ms[0];
    const double norm = std::hypot(ex, ey);
    if (norm > 0.0) {
        ex /= norm;
        ey /= norm;
    } else {
        ex = 1.0;
        ey = 0.0;
    }
    downrange_m.clear();
    crossrange_m.clear();
    for (size_t k = 0; k < table.size(); ++k) {
        const double de = moon_radius * std::cos(phi0) * (table.theta_rad[k] - theta0);
        const double dn = moon_radius * (table.phi_rad[k] - phi0);
        downrange_m.push_back(de * ex + dn * ey);
        crossrange_m.push_back(dn * ex - de * ey);
    }
}

std::vector<std::string> emit_plots(const TrajectoryTable* trajectory,
                                    const ParetoResult* pareto, double moon_radius,
                                    const std::string& out_dir) {
    if ((trajectory == nullptr || trajectory->size() == 0) &&
        (pareto == nullptr || pareto->points.empty())) {
        throw std::invalid_argument("emit_plots: nothing to plot");
    }
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& svg) {
        const std::string path = out_dir + "/" + name;
        write_text_file(path, svg);
        written.push_back(path);
    };

    if (trajectory != nullptr && trajectory->size() > 0) {
        const TrajectoryTable& t = *trajectory;
        std::vector<double> downrange, crossrange, hvel, pitch_deg;
        downrange_crossrange(t, moon_radius, downrange, crossrange);
        for (size_t k = 0; k < t.size(); ++k) {
            hvel.push_back(std::hypot(t.u_ms[k], t.v_ms[k]));
            pitch_deg.push_back(t.beta_rad[k] * 180.0 / M_PI);
        }
        std::vector<double> down_km(downrange), cross_km(crossrange), alt_km;
        for (auto& v : down_km) v /= 1000.0;
        for (auto& v : cross_km) v /= 1000.0;
        for (double a : t.alt_m) alt_km.push_back(a / 1000.0);

        emit("altitude_profile.svg",
             render_line_plot("Altitude Profile", "time [s]", "altitude [km]", t.t_s, alt_km));
        emit("vertical_velocity_profile.svg",
             render_line_plot("Vertical Velocity Profile", "time [s]",
                              "radial velocity [m/s]", t.t_s, t.w_ms));
        emit("downrange_profile.svg",
             render_line_plot("Downrange Profile", "time [s]", "downrange [km]", t.t_s,
                              down_km));
        emit("horizontal_velocity_profile.svg",
             render_line_plot("Horizontal Velocity Profile", "time [s]",
                              "horizontal velocity [m/s]", t.t_s, hvel));
        emit("crossrange_profile.svg",
             render_line_plot("Crossrange Profile", "time [s]", "crossrange [km]", t.t_s,
                              cross_km));
        emit("pitch_profile.svg",
             render_line_plot("Pitch Profile", "time [s]", "thrust declination [deg]",
                              t.t_s, pitch_deg));
    }

    if (pareto != nullptr && !pareto->points.empty()) {
        // converged points in thrust order, with the maximizer marked
        std::vector<std::pair<double, double>> pts;
        double max_thrust = -1.0;
        if (pareto->maximizer_index >= 0) {
            max_thrust = pareto->points[pareto->maximizer_index].t_max;
        }
        for (const auto& pt : pareto->points) {
            if (pt.status == SolverStatus::Converged) {
                pts.emplace_back(pt.thrust_to_mass0, pt.effective_payload);
            }
        }
        std::sort(pts.begin(), pts.end());
        std::vector<double> xs, ys;
        int marker = -1;
        for (const auto& [x, y] : pts) xs.push_back(x), ys.push_back(y);
        if (max_thrust > 0.0) {
            const double xmax = max_thrust / 1.0;
            for (size_t i = 0; i < xs.size(); ++i) {
                if (std::abs(xs[i] - pareto->points[pareto->maximizer_index].thrust_to_mass0) <
                    1e-12) {
                    marker = static_cast<int>(i);
                }
            }
            (void)xmax;
        }
        if (xs.empty()) {
            // all points failed; still render the raw grid so the file exists
            for (const auto& pt : pareto->points) {
                xs.push_back(pt.thrust_to_mass0);
                ys.push_back(pt.effective_payload);
            }
        }
        emit("pareto_curve.svg",
             render_line_plot("Pareto Optimal Curve", "thrust-to-mass [m/s^2]",
                              "effective payload [kg]", xs, ys, marker));
    }
    return written;
}

}  // namespace descent
