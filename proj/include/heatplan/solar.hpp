#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <vector>

#include "heatplan/geodata.hpp"

namespace heatplan::solar {

inline constexpr std::size_t hours_per_year = 8760;

/// One full non-leap year of hourly weather, consistent time (no DST shifts).
/// Timestamps are base_year-01-01T00:00:00Z + i hours; instantaneous values
/// represent the middle of each hour.
struct WeatherSeries {
    std::vector<double> temp_k;    ///< ambient temperature T_S(t)
    std::vector<double> ghi_w_m2;  ///< global horizontal irradiance
    std::vector<double> dni_w_m2;  ///< direct normal irradiance
    std::vector<double> dhi_w_m2;  ///< diffuse horizontal irradiance
    double latitude_deg = 53.1;
    double longitude_deg = 8.85;
    int base_year = 2025;
};

/// Throws ValidationError unless the series has 8760 steps, non-negative
/// irradiance, and GHI consistent with DHI + DNI*cos(zenith) on average.
void validate(const WeatherSeries& weather);

struct SunPosition {
    double zenith_deg;
    double azimuth_deg; ///< from north, clockwise (east = 90)
};

/// Sun position from a published ephemeris approximation (PSA algorithm),
/// accurate to well under half a degree for the years of interest.
/// `hour_utc` is the decimal hour of day_of_year (0-based) in UTC.
SunPosition sun_position(double latitude_deg, double longitude_deg, int year,
                         int day_of_year, double hour_utc);

/// Deterministic synthetic clear-sky year (Kasten-Young air mass, simple
/// beam attenuation, linear diffuse fraction, sinusoidal temperature).
/// GHI = DHI + DNI*cos(zenith) holds exactly at every step.
WeatherSeries make_clear_sky_year(double latitude_deg = 53.1, double longitude_deg = 8.85,
                                  int base_year = 2025);

WeatherSeries load_weather_csv(const std::filesystem::path& path,
                               double latitude_deg, double longitude_deg);
void save_weather_csv(const WeatherSeries& weather, const std::filesystem::path& path);

struct TranspositionParams {
    double albedo = 0.2;
    double system_efficiency = 0.18; ///< irradiance to electric power
};

/// Unit-area PV power series in W/m2 for a roof plane: isotropic-sky
/// transposition of the weather series times the fixed system efficiency.
std::vector<double> plane_of_array_series(const WeatherSeries& weather, double azimuth_deg,
                                          double tilt_deg, const TranspositionParams& params = {});

/// Average power per hour of day over the whole year:
/// out[h] = (1/365) * sum_d series[d*24 + h].
std::array<double, 24> day_hour_average(std::span<const double> series);

/// The fixed basis of roof planes whose generation curves span the
/// approximation space, plus the anchor-time day averages used for the
/// weight solve.
class StandardRoofSet {
public:
    /// Common tilt 30 deg, azimuths east/south/west, anchor hours 9/12/15.
    static StandardRoofSet standard(const WeatherSeries& weather,
                                    const TranspositionParams& params = {});

    /// Arbitrary basis; roofs.size() must equal anchor_hours.size(). Throws
    /// NumericalError if the anchor matrix condition number exceeds 1e8.
    StandardRoofSet(const WeatherSeries& weather,
                    std::vector<std::pair<double, double>> roofs_az_tilt,
                    std::vector<int> anchor_hours, const TranspositionParams& params = {});

    std::size_t size() const { return roofs_.size(); }
    const std::vector<int>& anchor_hours() const { return anchor_hours_; }
    const std::vector<double>& series(std::size_t n) const { return series_[n]; }
    const std::array<double, 24>& day_average(std::size_t n) const { return day_avg_[n]; }

    /// anchor_matrix[i][n] = <P_n>(t_d[i])
    const std::vector<std::vector<double>>& anchor_matrix() const { return anchor_matrix_; }

    /// Solves anchor_matrix * w = rhs exactly.
    std::vector<double> solve(std::span<const double> rhs) const;

    /// Reconstructed day-average profile sum_n w[n] * <P_n>(h).
    std::array<double, 24> reconstruct_day_average(std::span<const double> weights) const;

    /// Reconstructed full-year series sum_n w[n] * P_n(t).
    std::vector<double> reconstruct_series(std::span<const double> weights) const;

private:
    std::vector<std::pair<double, double>> roofs_;
    std::vector<int> anchor_hours_;
    std::vector<std::vector<double>> series_;
    std::vector<std::array<double, 24>> day_avg_;
    std::vector<std::vector<double>> anchor_matrix_;
};

/// Weights w_n of one roof plane: the unique solution of the anchor-time
/// linear system for the roof's transposed series.
std::vector<double> solve_roof_weights(std::span<const double> roof_series,
                                       const StandardRoofSet& standard);

/// Aggregated building weights in m2 of standard roof:
/// omega_n = sum_roofs area_m2 * w_n(roof).
std::vector<double> building_roof_weights(const geodata::BuildingRecord& building,
                                          const WeatherSeries& weather,
                                          const StandardRoofSet& standard,
                                          const TranspositionParams& params = {});

/// P_PV,b(t) in W from aggregated weights; a roofless building yields zeros.
std::vector<double> pv_series_from_weights(std::span<const double> omega,
                                           const StandardRoofSet& standard);

/// Convenience: per-roof weight solve + area aggregation + reconstruction.
std::vector<double> building_pv_potential(const geodata::BuildingRecord& building,
                                          const WeatherSeries& weather,
                                          const StandardRoofSet& standard,
                                          const TranspositionParams& params = {});

} // namespace heatplan::solar
