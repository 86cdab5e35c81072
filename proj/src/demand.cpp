#include "heatplan/demand.hpp"

#include <cmath>

#include "heatplan/errors.hpp"

namespace heatplan::demand {

double diversity(std::size_t n, const DiversityParams& params) {
    if (n == 0) {
        throw ArgumentError("diversity: building count must be >= 1");
    }
    const double q = params.a + params.b / (1.0 + std::pow(double(n) / params.c, params.d));
    return std::min(1.0, q);
}

namespace {

constexpr double kReferenceTempK = 290.15; // 17 degC heating threshold

// Hour-of-day weighting of the heat draw; the day starts with the largest
// peak, matching morning reheat behaviour.
constexpr double kHeatHourFactor[24] = {
    0.45, 0.42, 0.40, 0.40, 0.52, 0.85, 1.35, 1.62, 1.50, 1.28, 1.10, 1.00,
    0.95, 0.90, 0.88, 0.92, 1.05, 1.20, 1.25, 1.15, 1.00, 0.80, 0.62, 0.50};

// Household electricity: double peak, maximum at 19 h.
constexpr double kElectricityHourFactor[24] = {
    0.30, 0.25, 0.22, 0.20, 0.22, 0.35, 0.70, 1.00, 0.90, 0.75, 0.70, 0.72,
    0.78, 0.72, 0.68, 0.72, 0.90, 1.20, 1.45, 1.55, 1.35, 1.00, 0.65, 0.42};

int weekday_of_jan1(int year) {
    // Sakamoto; 0 = Monday.
    const int y = year - 1;
    const int dow_sun0 = (y + y / 4 - y / 100 + y / 400 + 1) % 7; // 0 = Sunday
    return (dow_sun0 + 6) % 7;
}

} // namespace

std::vector<double> heat_profile(const solar::WeatherSeries& weather, double annual_kwh) {
    if (annual_kwh < 0.0) {
        throw ArgumentError("heat_profile: annual demand must be >= 0");
    }
    const std::size_t n = weather.temp_k.size();
    if (n != solar::hours_per_year) {
        throw ArgumentError("heat_profile: weather must hold 8760 steps");
    }
    std::vector<double> daily_degree(365, 0.0);
    double max_degree = 0.0;
    for (int day = 0; day < 365; ++day) {
        double mean = 0.0;
        for (int h = 0; h < 24; ++h) {
            mean += weather.temp_k[std::size_t(day) * 24 + h];
        }
        mean /= 24.0;
        daily_degree[day] = std::max(kReferenceTempK - mean, 0.0);
        max_degree = std::max(max_degree, daily_degree[day]);
    }
    const double floor = 0.05 * max_degree; // hot water keeps summer demand nonzero

    std::vector<double> profile(n, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double shape = std::max(daily_degree[i / 24], floor) * kHeatHourFactor[i % 24];
        profile[i] = shape;
        total += shape;
    }
    if (total <= 0.0 || annual_kwh == 0.0) {
        std::fill(profile.begin(), profile.end(), 0.0);
        return profile;
    }
    const double scale = annual_kwh / total;
    for (auto& v : profile) {
        v *= scale;
    }
    return profile;
}

std::vector<double> electricity_profile(double annual_kwh, int base_year) {
    if (annual_kwh < 0.0) {
        throw ArgumentError("electricity_profile: annual demand must be >= 0");
    }
    std::vector<double> profile(solar::hours_per_year, 0.0);
    const int jan1 = weekday_of_jan1(base_year);
    double total = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const int weekday = (jan1 + int(i / 24)) % 7;
        const double day_factor = weekday >= 5 ? 1.12 : 1.0;
        profile[i] = kElectricityHourFactor[i % 24] * day_factor;
        total += profile[i];
    }
    if (annual_kwh == 0.0) {
        std::fill(profile.begin(), profile.end(), 0.0);
        return profile;
    }
    const double scale = annual_kwh / total;
    for (auto& v : profile) {
        v *= scale;
    }
    return profile;
}

double group_peak_kw(std::size_t n, double single_profile_peak_kw, double q_inf,
                     const DiversityParams& params) {
    if (single_profile_peak_kw < 0.0 || q_inf <= 0.0) {
        throw ArgumentError("group_peak_kw: peak must be >= 0 and q_inf > 0");
    }
    return double(n) * (single_profile_peak_kw / q_inf) * diversity(n, params);
}

} // namespace heatplan::demand
