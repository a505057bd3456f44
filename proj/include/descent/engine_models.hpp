#ifndef DESCENT_ENGINE_MODELS_HPP
#define DESCENT_ENGINE_MODELS_HPP

#include <stdexcept>

namespace descent {

// Cluster of identical engines throttled together.
struct ClusterEngineModel {
    int n = 1;                          // engine count
    double per_engine_max_thrust = 900.0;  // N
    double per_engine_isp = 310.0;         // s
    double per_engine_dry_mass = 8.0;      // kg

    void validate() const;
};

// Single engine with quadratic dry-mass/ISP dependence on max thrust.
// Dry mass peaks near -c1/(2 c2); the valid range keeps the fit inside
// its calibration region.
struct QuadraticEngineModel {
    double m0_eng = 2.229;      // kg
    double c1 = 0.006288;       // kg/N
    double c2 = -7.109e-8;      // kg/N^2
    double isp0 = 311.3;        // s
    double d1 = -0.0005976;     // s/N
    double d2 = 4.755e-9;       // s/N^2
    double thrust_low = 0.0;    // N, exclusive lower edge
    double thrust_high = 40000.0;  // N

    void validate() const;
};

// Resolved (max thrust, isp, dry mass) triple fed to the inner problem.
struct EngineCharacterization {
    double max_thrust = 0.0;  // N
    double isp = 0.0;         // s
    double dry_mass = 0.0;    // kg

    void validate() const;
};

// Collapses a cluster of identical engines to a single characterization:
// thrust and dry mass scale with n, isp is count-invariant.
EngineCharacterization resolve_cluster(const ClusterEngineModel& model);

// m0_eng + c1*t_max + c2*t_max^2; range error outside valid_thrust_range.
double engine_mass(const QuadraticEngineModel& model, double t_max);

// isp0 + d1*t_max + d2*t_max^2; range error outside valid_thrust_range.
double engine_isp(const QuadraticEngineModel& model, double t_max);

// Resolved characterization for the quadratic model at a given max thrust.
EngineCharacterization resolve_quadratic(const QuadraticEngineModel& model, double t_max);

// final vehicle mass minus engine dry mass; may be negative.
double effective_payload(double final_mass, double engine_dry_mass);

}  // namespace descent

#endif
