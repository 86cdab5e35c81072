#pragma once

#include <cstddef>
#include <vector>

#include "heatplan/solar.hpp"

namespace heatplan::demand {

/// Constants of the empirical diversity formula
/// q(n) = min(1, a + b / (1 + (n/c)^d)).
struct DiversityParams {
    double a = 0.450;
    double b = 0.551;
    double c = 53.8;
    double d = 1.76;
};

/// Coincidence factor of n aggregated buildings, in (a, 1].
double diversity(std::size_t n, const DiversityParams& params = {});

/// Large-n limit used to scale single-profile peaks up to a one-building
/// peak. The published limit (0.47) is kept rather than the formula's own
/// asymptote (0.450); configurable where it matters.
inline constexpr double default_q_inf = 0.47;

/// Hourly heat demand in kW integrating to annual_kwh: degree-day shape on
/// the daily mean temperature with a summer hot-water floor, modulated by an
/// hour-of-day factor table with morning emphasis.
std::vector<double> heat_profile(const solar::WeatherSeries& weather, double annual_kwh);

/// Hourly household electricity demand in kW integrating to annual_kwh:
/// fixed double-peak daily shape (largest at 19 h), weekend uplift.
std::vector<double> electricity_profile(double annual_kwh, int base_year = 2025);

/// Coincident peak of n identical buildings whose standard load profile
/// peaks at single_profile_peak_kw:
/// n * (single_profile_peak_kw / q_inf) * diversity(n).
double group_peak_kw(std::size_t n, double single_profile_peak_kw, double q_inf = default_q_inf,
                     const DiversityParams& params = {});

} // namespace heatplan::demand
