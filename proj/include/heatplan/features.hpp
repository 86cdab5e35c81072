#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "heatplan/geodata.hpp"

namespace heatplan::features {

/// The five footprint-specific clustering indicators of one building.
struct FeatureVector {
    double q_heat = 0.0; ///< kWh/m2/a
    double p9 = 0.0;     ///< W/m2, day-average PV potential at 09h
    double p12 = 0.0;    ///< W/m2, at 12h
    double p15 = 0.0;    ///< W/m2, at 15h
    double c_hnc = 0.0;  ///< EUR/m2, heat-network-connection cost

    std::array<double, 5> as_array() const { return {q_heat, p9, p12, p15, c_hnc}; }
};

/// Peak thermal demand of a single-family standard load profile:
/// 0.228 kW per MWh/a of annual demand.
double peak_heat_demand_kw(double annual_kwh);

/// Heat-network connection cost: 13.4111 EUR/kW * peak + 13976 EUR.
double connection_cost_eur(double peak_kw);

/// Builds the feature vector from the building and its reconstructed
/// day-hour-average PV profile (building level, W).
FeatureVector feature_vector(const geodata::BuildingRecord& building,
                             const std::array<double, 24>& pv_day_profile_w);

/// Per-dimension min/max over a fitting set.
struct MinMaxScaler {
    std::vector<double> min;
    std::vector<double> max;
};

MinMaxScaler fit_minmax(const std::vector<std::vector<double>>& vectors);

/// (x - min) / (max - min) per dimension; a constant dimension maps to 0.
std::vector<double> apply_minmax(std::span<const double> vector, const MinMaxScaler& params);

std::vector<std::vector<double>> apply_minmax_all(const std::vector<std::vector<double>>& vectors,
                                                  const MinMaxScaler& params);

void export_features_csv(const std::vector<std::string>& ids,
                         const std::vector<FeatureVector>& vectors,
                         const std::filesystem::path& path);

std::pair<std::vector<std::string>, std::vector<FeatureVector>>
load_features_csv(const std::filesystem::path& path);

} // namespace heatplan::features
