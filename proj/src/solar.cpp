#include "heatplan/solar.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/Dense>

#include "heatplan/csv.hpp"
#include "heatplan/errors.hpp"

namespace heatplan::solar {

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kDegToRad = kPi / 180.0;

long julian_day_number(int year, int month, int day) {
    // Fliegel-Van Flandern integer formula, valid for Gregorian dates.
    const long a = (14 - month) / 12;
    const long y = year + 4800 - a;
    const long m = month + 12 * a - 3;
    return day + (153 * m + 2) / 5 + 365 * y + y / 4 - y / 100 + y / 400 - 32045;
}

} // namespace

SunPosition sun_position(double latitude_deg, double longitude_deg, int year,
                         int day_of_year, double hour_utc) {
    // PSA algorithm (Blanco-Muriel et al.), ecliptic -> celestial -> local.
    const long jdn = julian_day_number(year, 1, 1) + day_of_year;
    const double elapsed = double(jdn) - 0.5 + hour_utc / 24.0 - 2451545.0;

    const double omega = 2.1429 - 0.0010394594 * elapsed;
    const double mean_longitude = 4.8950630 + 0.017202791698 * elapsed;
    const double mean_anomaly = 6.2400600 + 0.0172019699 * elapsed;
    const double ecliptic_longitude = mean_longitude + 0.03341607 * std::sin(mean_anomaly) +
                                      0.00034894 * std::sin(2.0 * mean_anomaly) - 0.0001134 -
                                      0.0000203 * std::sin(omega);
    const double ecliptic_obliquity = 0.4090928 - 6.2140e-9 * elapsed + 0.0000396 * std::cos(omega);

    const double sin_ecl = std::sin(ecliptic_longitude);
    double right_ascension = std::atan2(std::cos(ecliptic_obliquity) * sin_ecl,
                                        std::cos(ecliptic_longitude));
    if (right_ascension < 0.0) {
        right_ascension += 2.0 * kPi;
    }
    const double declination = std::asin(std::sin(ecliptic_obliquity) * sin_ecl);

    const double gmst = 6.6974243242 + 0.0657098283 * elapsed + hour_utc;
    const double lmst = (gmst * 15.0 + longitude_deg) * kDegToRad;
    const double hour_angle = lmst - right_ascension;

    const double lat = latitude_deg * kDegToRad;
    const double cos_zenith = std::cos(lat) * std::cos(hour_angle) * std::cos(declination) +
                              std::sin(declination) * std::sin(lat);
    double zenith = std::acos(std::clamp(cos_zenith, -1.0, 1.0));
    double azimuth = std::atan2(-std::sin(hour_angle),
                                std::tan(declination) * std::cos(lat) -
                                    std::sin(lat) * std::cos(hour_angle));
    if (azimuth < 0.0) {
        azimuth += 2.0 * kPi;
    }
    // Parallax correction (earth radius / 1 AU).
    zenith += 4.2587565e-5 * std::sin(zenith);

    return {zenith / kDegToRad, azimuth / kDegToRad};
}

void validate(const WeatherSeries& weather) {
    const std::size_t n = weather.temp_k.size();
    if (n != hours_per_year || weather.ghi_w_m2.size() != n || weather.dni_w_m2.size() != n ||
        weather.dhi_w_m2.size() != n) {
        throw ValidationError("weather series must have exactly 8760 hourly steps in every channel");
    }
    double closure_num = 0.0, closure_den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (weather.ghi_w_m2[i] < 0.0 || weather.dni_w_m2[i] < 0.0 || weather.dhi_w_m2[i] < 0.0) {
            throw ValidationError("weather series: irradiance must be non-negative (step " +
                                  std::to_string(i) + ")");
        }
        const auto pos = sun_position(weather.latitude_deg, weather.longitude_deg,
                                      weather.base_year, int(i / 24), double(i % 24) + 0.5);
        const double cos_z = std::max(0.0, std::cos(pos.zenith_deg * kDegToRad));
        const double expected = weather.dhi_w_m2[i] + weather.dni_w_m2[i] * cos_z;
        closure_num += std::abs(weather.ghi_w_m2[i] - expected);
        closure_den += std::max(weather.ghi_w_m2[i], expected);
    }
    if (closure_den > 0.0 && closure_num / closure_den > 0.10) {
        throw ValidationError("weather series: GHI inconsistent with DHI + DNI*cos(zenith)");
    }
}

WeatherSeries make_clear_sky_year(double latitude_deg, double longitude_deg, int base_year) {
    WeatherSeries weather;
    weather.latitude_deg = latitude_deg;
    weather.longitude_deg = longitude_deg;
    weather.base_year = base_year;
    weather.temp_k.resize(hours_per_year);
    weather.ghi_w_m2.resize(hours_per_year);
    weather.dni_w_m2.resize(hours_per_year);
    weather.dhi_w_m2.resize(hours_per_year);

    constexpr double solar_constant = 1361.0;
    for (std::size_t i = 0; i < hours_per_year; ++i) {
        const int day = int(i / 24);
        const double hour = double(i % 24) + 0.5;
        const auto pos = sun_position(latitude_deg, longitude_deg, base_year, day, hour);
        const double cos_z = std::cos(pos.zenith_deg * kDegToRad);
        double dni = 0.0, dhi = 0.0;
        if (cos_z > 0.0) {
            // Kasten-Young relative air mass.
            const double air_mass =
                1.0 / (cos_z + 0.50572 * std::pow(96.07995 - pos.zenith_deg, -1.6364));
            dni = solar_constant * std::pow(0.7, std::pow(air_mass, 0.678));
            dhi = 0.10 * solar_constant * cos_z;
        }
        weather.dni_w_m2[i] = dni;
        weather.dhi_w_m2[i] = dhi;
        weather.ghi_w_m2[i] = dhi + dni * std::max(cos_z, 0.0);
        // Maritime temperate climate: seasonal swing with a mild daily cycle.
        weather.temp_k[i] = 282.5 + 8.0 * std::cos(2.0 * kPi * (day - 203) / 365.0) +
                            3.5 * std::cos(2.0 * kPi * (hour - 14.5) / 24.0);
    }
    return weather;
}

namespace {

std::string iso_timestamp(int year, std::size_t step) {
    static constexpr int days_in_month[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int day = int(step / 24);
    const int hour = int(step % 24);
    int month = 0;
    while (day >= days_in_month[month]) {
        day -= days_in_month[month];
        ++month;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00Z", year, month + 1, day + 1, hour);
    return buf;
}

} // namespace

void save_weather_csv(const WeatherSeries& weather, const std::filesystem::path& path) {
    std::vector<std::string> lines{"timestamp,temp_k,ghi,dni,dhi"};
    lines.reserve(hours_per_year + 1);
    for (std::size_t i = 0; i < weather.temp_k.size(); ++i) {
        lines.push_back(iso_timestamp(weather.base_year, i) + ',' +
                        csv::format_double(weather.temp_k[i]) + ',' +
                        csv::format_double(weather.ghi_w_m2[i]) + ',' +
                        csv::format_double(weather.dni_w_m2[i]) + ',' +
                        csv::format_double(weather.dhi_w_m2[i]));
    }
    csv::write_lines(path, lines);
}

WeatherSeries load_weather_csv(const std::filesystem::path& path, double latitude_deg,
                               double longitude_deg) {
    const csv::Table table = csv::read_table(path);
    const std::string hint = path.filename().string();
    const std::size_t c_ts = table.column("timestamp", hint);
    const std::size_t c_temp = table.column("temp_k", hint);
    const std::size_t c_ghi = table.column("ghi", hint);
    const std::size_t c_dni = table.column("dni", hint);
    const std::size_t c_dhi = table.column("dhi", hint);
    if (table.rows.size() != hours_per_year) {
        throw ValidationError(hint + ": expected 8760 rows, found " +
                              std::to_string(table.rows.size()));
    }

    WeatherSeries weather;
    weather.latitude_deg = latitude_deg;
    weather.longitude_deg = longitude_deg;
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (std::sscanf(table.rows[0][c_ts].c_str(), "%d-%d-%dT%d:%d:%d", &year, &month, &day, &hour,
                    &minute, &second) < 4) {
        throw ValidationError(hint + ": cannot parse ISO-8601 timestamp '" + table.rows[0][c_ts] + "'");
    }
    weather.base_year = year;
    weather.temp_k.reserve(hours_per_year);
    weather.ghi_w_m2.reserve(hours_per_year);
    weather.dni_w_m2.reserve(hours_per_year);
    weather.dhi_w_m2.reserve(hours_per_year);
    for (const auto& row : table.rows) {
        weather.temp_k.push_back(csv::parse_double(row[c_temp], hint + " temp_k"));
        weather.ghi_w_m2.push_back(csv::parse_double(row[c_ghi], hint + " ghi"));
        weather.dni_w_m2.push_back(csv::parse_double(row[c_dni], hint + " dni"));
        weather.dhi_w_m2.push_back(csv::parse_double(row[c_dhi], hint + " dhi"));
    }
    validate(weather);
    return weather;
}

std::vector<double> plane_of_array_series(const WeatherSeries& weather, double azimuth_deg,
                                          double tilt_deg, const TranspositionParams& params) {
    if (azimuth_deg < 0.0 || azimuth_deg >= 360.0 || tilt_deg < 0.0 || tilt_deg > 90.0) {
        throw ArgumentError("plane_of_array_series: angles out of range");
    }
    const std::size_t n = weather.temp_k.size();
    if (n != hours_per_year) {
        throw ArgumentError("plane_of_array_series: weather must hold 8760 steps");
    }
    const double tilt = tilt_deg * kDegToRad;
    const double cos_tilt = std::cos(tilt);
    const double sin_tilt = std::sin(tilt);
    const double diffuse_view = (1.0 + cos_tilt) / 2.0;
    const double ground_view = (1.0 - cos_tilt) / 2.0;

    std::vector<double> power(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto pos = sun_position(weather.latitude_deg, weather.longitude_deg,
                                      weather.base_year, int(i / 24), double(i % 24) + 0.5);
        const double zen = pos.zenith_deg * kDegToRad;
        const double cos_z = std::cos(zen);
        double beam = 0.0;
        if (cos_z > 0.0) {
            const double cos_incidence =
                cos_tilt * cos_z +
                sin_tilt * std::sin(zen) * std::cos((pos.azimuth_deg - azimuth_deg) * kDegToRad);
            beam = weather.dni_w_m2[i] * std::max(cos_incidence, 0.0);
        }
        const double poa = beam + weather.dhi_w_m2[i] * diffuse_view +
                           weather.ghi_w_m2[i] * params.albedo * ground_view;
        power[i] = poa * params.system_efficiency;
    }
    return power;
}

std::array<double, 24> day_hour_average(std::span<const double> series) {
    if (series.size() != hours_per_year) {
        throw ArgumentError("day_hour_average: series must hold 8760 steps");
    }
    std::array<double, 24> avg{};
    for (std::size_t i = 0; i < series.size(); ++i) {
        avg[i % 24] += series[i];
    }
    for (auto& v : avg) {
        v /= 365.0;
    }
    return avg;
}

StandardRoofSet::StandardRoofSet(const WeatherSeries& weather,
                                 std::vector<std::pair<double, double>> roofs_az_tilt,
                                 std::vector<int> anchor_hours, const TranspositionParams& params)
    : roofs_(std::move(roofs_az_tilt)), anchor_hours_(std::move(anchor_hours)) {
    if (roofs_.empty() || roofs_.size() != anchor_hours_.size()) {
        throw ArgumentError("StandardRoofSet: need as many anchor times as standard roofs");
    }
    const std::size_t n = roofs_.size();
    series_.reserve(n);
    day_avg_.reserve(n);
    for (const auto& [azimuth, tilt] : roofs_) {
        series_.push_back(plane_of_array_series(weather, azimuth, tilt, params));
        day_avg_.push_back(day_hour_average(series_.back()));
    }
    anchor_matrix_.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const int hour = anchor_hours_[i];
        if (hour < 0 || hour >= 24) {
            throw ArgumentError("StandardRoofSet: anchor hour outside [0, 24)");
        }
        for (std::size_t j = 0; j < n; ++j) {
            anchor_matrix_[i][j] = day_avg_[j][hour];
        }
    }

    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = anchor_matrix_[i][j];
        }
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const double smin = svd.singularValues()(n - 1);
    if (smin <= 0.0 || svd.singularValues()(0) / smin > 1e8) {
        throw NumericalError(
            "standard-roof anchor matrix is singular or ill-conditioned; "
            "choose different anchor times");
    }
}

StandardRoofSet StandardRoofSet::standard(const WeatherSeries& weather,
                                          const TranspositionParams& params) {
    return StandardRoofSet(weather, {{90.0, 30.0}, {180.0, 30.0}, {270.0, 30.0}}, {9, 12, 15},
                           params);
}

std::vector<double> StandardRoofSet::solve(std::span<const double> rhs) const {
    const std::size_t n = roofs_.size();
    if (rhs.size() != n) {
        throw ArgumentError("StandardRoofSet::solve: rhs size mismatch");
    }
    Eigen::MatrixXd m(n, n);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
        b(i) = rhs[i];
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = anchor_matrix_[i][j];
        }
    }
    const Eigen::VectorXd w = m.partialPivLu().solve(b);
    return std::vector<double>(w.data(), w.data() + n);
}

std::array<double, 24> StandardRoofSet::reconstruct_day_average(
    std::span<const double> weights) const {
    if (weights.size() != roofs_.size()) {
        throw ArgumentError("reconstruct_day_average: weight size mismatch");
    }
    std::array<double, 24> out{};
    for (int h = 0; h < 24; ++h) {
        for (std::size_t j = 0; j < roofs_.size(); ++j) {
            out[h] += weights[j] * day_avg_[j][h];
        }
    }
    return out;
}

std::vector<double> StandardRoofSet::reconstruct_series(std::span<const double> weights) const {
    if (weights.size() != roofs_.size()) {
        throw ArgumentError("reconstruct_series: weight size mismatch");
    }
    std::vector<double> out(hours_per_year, 0.0);
    for (std::size_t j = 0; j < roofs_.size(); ++j) {
        const double w = weights[j];
        const auto& s = series_[j];
        for (std::size_t i = 0; i < hours_per_year; ++i) {
            out[i] += w * s[i];
        }
    }
    return out;
}

std::vector<double> solve_roof_weights(std::span<const double> roof_series,
                                       const StandardRoofSet& standard) {
    const auto avg = day_hour_average(roof_series);
    std::vector<double> rhs;
    rhs.reserve(standard.size());
    for (const int hour : standard.anchor_hours()) {
        rhs.push_back(avg[hour]);
    }
    return standard.solve(rhs);
}

std::vector<double> building_roof_weights(const geodata::BuildingRecord& building,
                                          const WeatherSeries& weather,
                                          const StandardRoofSet& standard,
                                          const TranspositionParams& params) {
    std::vector<double> omega(standard.size(), 0.0);
    for (const auto& roof : building.roofs) {
        const auto series = plane_of_array_series(weather, roof.azimuth_deg, roof.tilt_deg, params);
        const auto w = solve_roof_weights(series, standard);
        for (std::size_t n = 0; n < omega.size(); ++n) {
            omega[n] += roof.area_m2 * w[n];
        }
    }
    return omega;
}

std::vector<double> pv_series_from_weights(std::span<const double> omega,
                                           const StandardRoofSet& standard) {
    return standard.reconstruct_series(omega);
}

std::vector<double> building_pv_potential(const geodata::BuildingRecord& building,
                                          const WeatherSeries& weather,
                                          const StandardRoofSet& standard,
                                          const TranspositionParams& params) {
    const auto omega = building_roof_weights(building, weather, standard, params);
    return pv_series_from_weights(omega, standard);
}

} // namespace heatplan::solar
