#include "heatplan/features.hpp"

#include "heatplan/csv.hpp"
#include "heatplan/errors.hpp"

namespace heatplan::features {

double peak_heat_demand_kw(double annual_kwh) {
    if (annual_kwh < 0.0) {
        throw ArgumentError("peak_heat_demand_kw: annual demand must be >= 0");
    }
    return 0.228 * (annual_kwh / 1000.0);
}

double connection_cost_eur(double peak_kw) {
    if (peak_kw < 0.0) {
        throw ArgumentError("connection_cost_eur: peak must be >= 0");
    }
    return 13.4111 * peak_kw + 13976.0;
}

FeatureVector feature_vector(const geodata::BuildingRecord& building,
                             const std::array<double, 24>& pv_day_profile_w) {
    const double area = building.footprint_m2;
    if (!(area > 0.0)) {
        throw ArgumentError("feature_vector: footprint must be > 0");
    }
    FeatureVector f;
    f.q_heat = building.annual_heat_demand_kwh / area;
    f.p9 = pv_day_profile_w[9] / area;
    f.p12 = pv_day_profile_w[12] / area;
    f.p15 = pv_day_profile_w[15] / area;
    f.c_hnc = connection_cost_eur(peak_heat_demand_kw(building.annual_heat_demand_kwh)) / area;
    return f;
}

MinMaxScaler fit_minmax(const std::vector<std::vector<double>>& vectors) {
    if (vectors.empty()) {
        throw ArgumentError("fit_minmax: need at least one vector");
    }
    const std::size_t dims = vectors.front().size();
    MinMaxScaler params;
    params.min.assign(dims, 0.0);
    params.max.assign(dims, 0.0);
    for (std::size_t d = 0; d < dims; ++d) {
        params.min[d] = params.max[d] = vectors.front()[d];
    }
    for (const auto& v : vectors) {
        if (v.size() != dims) {
            throw ArgumentError("fit_minmax: inconsistent dimensions");
        }
        for (std::size_t d = 0; d < dims; ++d) {
            params.min[d] = std::min(params.min[d], v[d]);
            params.max[d] = std::max(params.max[d], v[d]);
        }
    }
    return params;
}

std::vector<double> apply_minmax(std::span<const double> vector, const MinMaxScaler& params) {
    if (vector.size() != params.min.size()) {
        throw ArgumentError("apply_minmax: dimension mismatch");
    }
    std::vector<double> out(vector.size(), 0.0);
    for (std::size_t d = 0; d < vector.size(); ++d) {
        const double span = params.max[d] - params.min[d];
        out[d] = span > 0.0 ? (vector[d] - params.min[d]) / span : 0.0;
    }
    return out;
}

std::vector<std::vector<double>> apply_minmax_all(const std::vector<std::vector<double>>& vectors,
                                                  const MinMaxScaler& params) {
    std::vector<std::vector<double>> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) {
        out.push_back(apply_minmax(v, params));
    }
    return out;
}

void export_features_csv(const std::vector<std::string>& ids,
                         const std::vector<FeatureVector>& vectors,
                         const std::filesystem::path& path) {
    if (ids.size() != vectors.size()) {
        throw ArgumentError("export_features_csv: id/vector count mismatch");
    }
    std::vector<std::string> lines{"id,q_heat,p9,p12,p15,c_hnc"};
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& f = vectors[i];
        lines.push_back(ids[i] + ',' + csv::format_double(f.q_heat) + ',' +
                        csv::format_double(f.p9) + ',' + csv::format_double(f.p12) + ',' +
                        csv::format_double(f.p15) + ',' + csv::format_double(f.c_hnc));
    }
    csv::write_lines(path, lines);
}

std::pair<std::vector<std::string>, std::vector<FeatureVector>>
load_features_csv(const std::filesystem::path& path) {
    const csv::Table table = csv::read_table(path);
    const std::string hint = path.filename().string();
    const std::size_t c_id = table.column("id", hint);
    const std::size_t c_q = table.column("q_heat", hint);
    const std::size_t c9 = table.column("p9", hint);
    const std::size_t c12 = table.column("p12", hint);
    const std::size_t c15 = table.column("p15", hint);
    const std::size_t c_c = table.column("c_hnc", hint);

    std::vector<std::string> ids;
    std::vector<FeatureVector> vectors;
    for (const auto& row : table.rows) {
        ids.push_back(row[c_id]);
        FeatureVector f;
        f.q_heat = csv::parse_double(row[c_q], hint + " q_heat");
        f.p9 = csv::parse_double(row[c9], hint + " p9");
        f.p12 = csv::parse_double(row[c12], hint + " p12");
        f.p15 = csv::parse_double(row[c15], hint + " p15");
        f.c_hnc = csv::parse_double(row[c_c], hint + " c_hnc");
        vectors.push_back(f);
    }
    return {std::move(ids), std::move(vectors)};
}

} // namespace heatplan::features
