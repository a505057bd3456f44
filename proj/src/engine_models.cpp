#include "descent/engine_models.hpp"

#include <cmath>
#include <string>

namespace descent {

void ClusterEngineModel::validate() const {
    if (n < 1) throw std::invalid_argument("ClusterEngineModel: n must be >= 1");
    if (per_engine_max_thrust <= 0.0 || per_engine_isp <= 0.0 || per_engine_dry_mass <= 0.0) {
        throw std::invalid_argument("ClusterEngineModel: per-engine values must be > 0");
    }
}

void QuadraticEngineModel::validate() const {
    if (thrust_high <= thrust_low) {
        throw std::invalid_argument("QuadraticEngineModel: empty thrust range");
    }
    // Mass and isp must stay positive and mass non-decreasing across the range.
    for (double t : {thrust_low, thrust_high}) {
        if (m0_eng + c1 * t + c2 * t * t <= 0.0) {
            throw std::invalid_argument("QuadraticEngineModel: non-positive engine mass in range");
        }
        if (isp0 + d1 * t + d2 * t * t <= 0.0) {
            throw std::invalid_argument("QuadraticEngineModel: non-positive isp in range");
        }
    }
    if (c1 + 2.0 * c2 * thrust_high < 0.0) {
        throw std::invalid_argument(
            "QuadraticEngineModel: engine mass decreasing at range top (past quadratic vertex)");
    }
}

void EngineCharacterization::validate() const {
    if (max_thrust <= 0.0 || isp <= 0.0 || dry_mass <= 0.0) {
        throw std::invalid_argument("EngineCharacterization: all fields must be > 0");
    }
}

EngineCharacterization resolve_cluster(const ClusterEngineModel& model) {
    model.validate();
    return EngineCharacterization{model.n * model.per_engine_max_thrust,
                                  model.per_engine_isp,
                                  model.n * model.per_engine_dry_mass};
}

namespace {

void check_range(const QuadraticEngineModel& model, double t_max, const char* op) {
    if (t_max <= model.thrust_low || t_max > model.thrust_high) {
        throw std::out_of_range(std::string(op) + ": t_max " + std::to_string(t_max) +
                                " N outside valid range [" + std::to_string(model.thrust_low) +
                                ", " + std::to_string(model.thrust_high) + "]");
    }
}

}  // namespace

double engine_mass(const QuadraticEngineModel& model, double t_max) {
    check_range(model, t_max, "engine_mass");
    return model.m0_eng + model.c1 * t_max + model.c2 * t_max * t_max;
}

double engine_isp(const QuadraticEngineModel& model, double t_max) {
    check_range(model, t_max, "engine_isp");
    return model.isp0 + model.d1 * t_max + model.d2 * t_max * t_max;
}

EngineCharacterization resolve_quadratic(const QuadraticEngineModel& model, double t_max) {
    return EngineCharacterization{t_max, engine_isp(model, t_max), engine_mass(model, t_max)};
}

double effective_payload(double final_mass, double engine_dry_mass) {
    if (final_mass <= 0.0) {
        throw std::invalid_argument("effective_payload: final_mass must be > 0");
    }
    return final_mass - engine_dry_mass;
}

}  // namespace descent
