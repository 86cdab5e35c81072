#include "heatplan/geodata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "heatplan/csv.hpp"
#include "heatplan/errors.hpp"
#include "heatplan/rng.hpp"

namespace heatplan::geodata {

namespace {

void validate_roof(const RoofSegment& roof, const std::string& building_id) {
    if (!(roof.area_m2 > 0.0)) {
        throw ValidationError("building '" + building_id + "': roof area must be > 0");
    }
    if (roof.azimuth_deg < 0.0 || roof.azimuth_deg >= 360.0) {
        throw ValidationError("building '" + building_id + "': roof azimuth outside [0, 360)");
    }
    if (roof.tilt_deg < 0.0 || roof.tilt_deg > 90.0) {
        throw ValidationError("building '" + building_id + "': roof tilt outside [0, 90]");
    }
}

} // namespace

void validate(const Dataset& dataset) {
    if (dataset.buildings.empty()) {
        throw ValidationError("dataset is empty");
    }
    std::unordered_set<std::string> seen;
    seen.reserve(dataset.buildings.size());
    for (const auto& b : dataset.buildings) {
        if (b.id.empty()) {
            throw ValidationError("building with empty id");
        }
        if (!seen.insert(b.id).second) {
            throw ValidationError("duplicate building id '" + b.id + "'");
        }
        if (!(b.footprint_m2 > 0.0)) {
            throw ValidationError("building '" + b.id + "': footprint must be > 0");
        }
        if (b.annual_heat_demand_kwh < 0.0) {
            throw ValidationError("building '" + b.id + "': annual heat demand must be >= 0");
        }
        for (const auto& roof : b.roofs) {
            validate_roof(roof, b.id);
        }
    }
}

Dataset load_dataset_csv(const std::filesystem::path& buildings_csv,
                         const std::filesystem::path& roofs_csv) {
    const csv::Table table = csv::read_table(buildings_csv);
    const std::string hint = buildings_csv.filename().string();
    const std::size_t c_id = table.column("id", hint);
    const std::size_t c_x = table.column("x_m", hint);
    const std::size_t c_y = table.column("y_m", hint);
    const std::size_t c_area = table.column("footprint_m2", hint);
    const std::size_t c_demand = table.column("annual_heat_demand_kwh", hint);

    Dataset dataset;
    dataset.buildings.reserve(table.rows.size());
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& row : table.rows) {
        if (row.size() < table.header.size()) {
            throw SchemaError(hint + ": row has fewer fields than the header");
        }
        BuildingRecord b;
        b.id = row[c_id];
        b.x_m = csv::parse_double(row[c_x], hint + " x_m");
        b.y_m = csv::parse_double(row[c_y], hint + " y_m");
        b.footprint_m2 = csv::parse_double(row[c_area], hint + " footprint_m2");
        b.annual_heat_demand_kwh = csv::parse_double(row[c_demand], hint + " annual_heat_demand_kwh");
        index.emplace(b.id, dataset.buildings.size());
        dataset.buildings.push_back(std::move(b));
    }

    if (std::filesystem::exists(roofs_csv)) {
        const csv::Table roofs = csv::read_table(roofs_csv);
        const std::string rhint = roofs_csv.filename().string();
        const std::size_t c_bid = roofs.column("building_id", rhint);
        const std::size_t c_az = roofs.column("azimuth_deg", rhint);
        const std::size_t c_tilt = roofs.column("tilt_deg", rhint);
        const std::size_t c_rarea = roofs.column("area_m2", rhint);
        for (const auto& row : roofs.rows) {
            if (row.size() < roofs.header.size()) {
                throw SchemaError(rhint + ": row has fewer fields than the header");
            }
            const auto it = index.find(row[c_bid]);
            if (it == index.end()) {
                throw ValidationError(rhint + ": roof references unknown building id '" + row[c_bid] + "'");
            }
            RoofSegment roof;
            roof.azimuth_deg = csv::parse_double(row[c_az], rhint + " azimuth_deg");
            roof.tilt_deg = csv::parse_double(row[c_tilt], rhint + " tilt_deg");
            roof.area_m2 = csv::parse_double(row[c_rarea], rhint + " area_m2");
            dataset.buildings[it->second].roofs.push_back(roof);
        }
    }

    validate(dataset);
    return dataset;
}

namespace {

std::pair<double, double> polygon_centroid(const nlohmann::json& ring) {
    // Shoelace centroid of the exterior ring. Falls back to the vertex mean
    // for degenerate (zero-area) rings.
    double area2 = 0.0, cx = 0.0, cy = 0.0, mx = 0.0, my = 0.0;
    const std::size_t n = ring.size();
    std::size_t distinct = n > 0 && ring[n - 1] == ring[0] ? n - 1 : n;
    for (std::size_t i = 0; i < distinct; ++i) {
        const double x0 = ring[i][0].get<double>();
        const double y0 = ring[i][1].get<double>();
        const std::size_t j = (i + 1) % distinct;
        const double x1 = ring[j][0].get<double>();
        const double y1 = ring[j][1].get<double>();
        const double cross = x0 * y1 - x1 * y0;
        area2 += cross;
        cx += (x0 + x1) * cross;
        cy += (y0 + y1) * cross;
        mx += x0;
        my += y0;
    }
    if (std::abs(area2) < 1e-12) {
        return {mx / double(distinct), my / double(distinct)};
    }
    return {cx / (3.0 * area2), cy / (3.0 * area2)};
}

Dataset load_dataset_geojson(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open file: " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path.string() + ": not valid JSON: " + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection") {
        throw SchemaError(path.string() + ": expected a GeoJSON FeatureCollection");
    }

    Dataset dataset;
    if (doc.contains("crs_note")) {
        dataset.crs_note = doc["crs_note"].get<std::string>();
    }
    for (const auto& feature : doc.value("features", nlohmann::json::array())) {
        const auto& props = feature.value("properties", nlohmann::json::object());
        BuildingRecord b;
        if (!props.contains("id")) {
            throw SchemaError(path.string() + ": feature is missing required property 'id'");
        }
        b.id = props["id"].is_string() ? props["id"].get<std::string>()
                                       : props["id"].dump();
        for (const char* key : {"footprint_m2", "annual_heat_demand_kwh"}) {
            if (!props.contains(key)) {
                throw SchemaError(path.string() + ": feature '" + b.id +
                                  "' is missing required property '" + key + "'");
            }
        }
        b.footprint_m2 = props["footprint_m2"].get<double>();
        b.annual_heat_demand_kwh = props["annual_heat_demand_kwh"].get<double>();

        const auto& geom = feature.value("geometry", nlohmann::json::object());
        const std::string gtype = geom.value("type", "");
        if (gtype == "Point") {
            b.x_m = geom["coordinates"][0].get<double>();
            b.y_m = geom["coordinates"][1].get<double>();
        } else if (gtype == "Polygon") {
            std::tie(b.x_m, b.y_m) = polygon_centroid(geom["coordinates"][0]);
        } else {
            throw SchemaError(path.string() + ": feature '" + b.id +
                              "': unsupported geometry type '" + gtype + "'");
        }

        for (const auto& r : props.value("roofs", nlohmann::json::array())) {
            RoofSegment roof;
            roof.azimuth_deg = r.at("azimuth_deg").get<double>();
            roof.tilt_deg = r.at("tilt_deg").get<double>();
            roof.area_m2 = r.at("area_m2").get<double>();
            b.roofs.push_back(roof);
        }
        dataset.buildings.push_back(std::move(b));
    }

    validate(dataset);
    return dataset;
}

} // namespace

Dataset load_dataset(const std::filesystem::path& path, GeoFormat format) {
    if (format == GeoFormat::geojson) {
        return load_dataset_geojson(path);
    }
    if (std::filesystem::is_directory(path)) {
        return load_dataset_csv(path / "buildings.csv", path / "roofs.csv");
    }
    return load_dataset_csv(path, path.parent_path() / "roofs.csv");
}

std::filesystem::path export_dataset(const Dataset& dataset,
                                     const std::filesystem::path& dir,
                                     GeoFormat format) {
    std::filesystem::create_directories(dir);
    if (format == GeoFormat::csv) {
        std::vector<std::string> lines{"id,x_m,y_m,footprint_m2,annual_heat_demand_kwh"};
        std::vector<std::string> roof_lines{"building_id,azimuth_deg,tilt_deg,area_m2"};
        for (const auto& b : dataset.buildings) {
            lines.push_back(b.id + ',' + csv::format_double(b.x_m) + ',' + csv::format_double(b.y_m) +
                            ',' + csv::format_double(b.footprint_m2) + ',' +
                            csv::format_double(b.annual_heat_demand_kwh));
            for (const auto& r : b.roofs) {
                roof_lines.push_back(b.id + ',' + csv::format_double(r.azimuth_deg) + ',' +
                                     csv::format_double(r.tilt_deg) + ',' + csv::format_double(r.area_m2));
            }
        }
        csv::write_lines(dir / "buildings.csv", lines);
        csv::write_lines(dir / "roofs.csv", roof_lines);
        return dir / "buildings.csv";
    }

    nlohmann::json doc;
    doc["type"] = "FeatureCollection";
    doc["crs_note"] = dataset.crs_note;
    auto& features = doc["features"] = nlohmann::json::array();
    for (const auto& b : dataset.buildings) {
        nlohmann::json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "Point"}, {"coordinates", {b.x_m, b.y_m}}};
        auto& props = f["properties"];
        props["id"] = b.id;
        props["footprint_m2"] = b.footprint_m2;
        props["annual_heat_demand_kwh"] = b.annual_heat_demand_kwh;
        auto& roofs = props["roofs"] = nlohmann::json::array();
        for (const auto& r : b.roofs) {
            roofs.push_back({{"azimuth_deg", r.azimuth_deg},
                             {"tilt_deg", r.tilt_deg},
                             {"area_m2", r.area_m2}});
        }
        features.push_back(std::move(f));
    }
    const auto path = dir / "dataset.geojson";
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write file: " + path.string());
    }
    out << doc.dump(1) << '\n';
    return path;
}

// ---------------------------------------------------------------------------
// Synthetic building stock
// ---------------------------------------------------------------------------

namespace {

struct Archetype {
    double footprint_mean, footprint_sd;
    double specific_demand_mean, specific_demand_sd; // kWh/m2/a
    double tilt_mean, tilt_sd;
    enum class Roof { gable, flat, none } roof;
};

// Five building archetypes: old single-family, renovated single-family,
// multi-family, flat-roof commercial, and roofless high-demand outliers.
// Distributions overlap so that energy categories cut across archetypes.
constexpr Archetype kArchetypes[] = {
    {95.0, 25.0, 175.0, 30.0, 40.0, 8.0, Archetype::Roof::gable},
    {120.0, 30.0, 105.0, 25.0, 34.0, 7.0, Archetype::Roof::gable},
    {260.0, 60.0, 140.0, 28.0, 26.0, 6.0, Archetype::Roof::gable},
    {400.0, 90.0, 75.0, 18.0, 8.0, 3.0, Archetype::Roof::flat},
    {65.0, 12.0, 225.0, 30.0, 0.0, 0.0, Archetype::Roof::none},
};
constexpr std::size_t kArchetypeCount = sizeof(kArchetypes) / sizeof(kArchetypes[0]);

double round_to(double value, double per_unit) {
    return std::round(value * per_unit) / per_unit;
}

int pick_archetype(rng::Engine& engine, const double (&mix)[kArchetypeCount]) {
    const double u = rng::uniform(engine);
    double acc = 0.0;
    for (std::size_t i = 0; i < kArchetypeCount; ++i) {
        acc += mix[i];
        if (u < acc) {
            return static_cast<int>(i);
        }
    }
    return static_cast<int>(kArchetypeCount) - 1;
}

BuildingRecord make_building(rng::Engine& engine, int arche_index, double x, double y,
                             double street_azimuth_deg, std::size_t ordinal, std::size_t width) {
    const Archetype& a = kArchetypes[arche_index];
    BuildingRecord b;
    std::string num = std::to_string(ordinal);
    b.id = "b" + std::string(width > num.size() ? width - num.size() : 0, '0') + num;
    b.x_m = round_to(x, 100.0);
    b.y_m = round_to(y, 100.0);
    b.footprint_m2 = round_to(std::max(30.0, rng::normal(engine, a.footprint_mean, a.footprint_sd)), 10.0);
    const double specific = std::max(25.0, rng::normal(engine, a.specific_demand_mean, a.specific_demand_sd));
    b.annual_heat_demand_kwh = round_to(specific * b.footprint_m2, 1.0);

    auto wrap_deg = [](double deg) {
        deg = std::fmod(deg, 360.0);
        return deg < 0.0 ? deg + 360.0 : deg;
    };

    if (a.roof == Archetype::Roof::gable) {
        // Ridge parallel to the street; the two slopes face opposite sides.
        const double side = street_azimuth_deg + 90.0 * double(rng::uniform_index(engine, 4));
        const double tilt = std::clamp(rng::normal(engine, a.tilt_mean, a.tilt_sd), 5.0, 75.0);
        const double slope_area = b.footprint_m2 / (2.0 * std::cos(tilt * 3.141592653589793 / 180.0));
        const double usable = rng::uniform(engine, 0.75, 0.98);
        for (int s = 0; s < 2; ++s) {
            RoofSegment roof;
            roof.azimuth_deg = wrap_deg(round_to(side + 180.0 * s + rng::normal(engine, 0.0, 4.0), 10.0));
            roof.tilt_deg = round_to(tilt, 10.0);
            roof.area_m2 = round_to(std::max(1.0, slope_area * usable), 100.0);
            b.roofs.push_back(roof);
        }
    } else if (a.roof == Archetype::Roof::flat) {
        RoofSegment roof;
        roof.azimuth_deg = wrap_deg(round_to(street_azimuth_deg + rng::uniform(engine, 0.0, 360.0), 10.0));
        roof.tilt_deg = round_to(std::clamp(rng::normal(engine, a.tilt_mean, a.tilt_sd), 0.0, 20.0), 10.0);
        roof.area_m2 = round_to(std::max(1.0, b.footprint_m2 * rng::uniform(engine, 0.8, 0.92)), 100.0);
        b.roofs.push_back(roof);
    }
    return b;
}

void fill_grid(rng::Engine& engine, Dataset& dataset, std::size_t count,
               double origin_x, double origin_y, double street_azimuth_deg,
               const double (&mix)[kArchetypeCount], std::size_t first_ordinal, std::size_t width) {
    const std::size_t columns = std::max<std::size_t>(1, std::size_t(std::ceil(std::sqrt(double(count)))));
    const double spacing = 21.0;
    const double rad = street_azimuth_deg * 3.141592653589793 / 180.0;
    const double ux = std::cos(rad), uy = std::sin(rad); // along-street direction
    for (std::size_t i = 0; i < count; ++i) {
        const double gx = double(i % columns) * spacing + rng::normal(engine, 0.0, 2.0);
        const double gy = double(i / columns) * spacing + rng::normal(engine, 0.0, 2.0);
        const double x = origin_x + gx * ux - gy * uy;
        const double y = origin_y + gx * uy + gy * ux;
        const int arche = pick_archetype(engine, mix);
        dataset.buildings.push_back(
            make_building(engine, arche, x, y, street_azimuth_deg, first_ordinal + i, width));
    }
}

} // namespace

std::size_t district_a_count(std::size_t n_buildings) {
    return (n_buildings + 1) / 2;
}

Dataset generate_synthetic(std::uint64_t seed, std::size_t n_buildings, SyntheticLayout layout) {
    if (n_buildings == 0) {
        throw ArgumentError("generate_synthetic: n_buildings must be >= 1");
    }
    rng::Engine engine(rng::mix(seed, layout == SyntheticLayout::grid ? 1 : 2));
    Dataset dataset;
    dataset.buildings.reserve(n_buildings);
    dataset.crs_note = "synthetic planar meters";
    const std::size_t width = std::to_string(n_buildings).size();

    if (layout == SyntheticLayout::grid) {
        const double mix[kArchetypeCount] = {0.24, 0.30, 0.24, 0.18, 0.04};
        fill_grid(engine, dataset, n_buildings, 0.0, 0.0, 0.0, mix, 1, width);
    } else {
        const std::size_t n_a = district_a_count(n_buildings);
        const std::size_t n_b = n_buildings - n_a;
        // District A: older stock, streets on a north-south grid.
        const double mix_a[kArchetypeCount] = {0.34, 0.22, 0.24, 0.13, 0.07};
        fill_grid(engine, dataset, n_a, 0.0, 0.0, 0.0, mix_a, 1, width);
        // District B: newer stock, streets rotated 45 degrees, across a gap.
        const double mix_b[kArchetypeCount] = {0.12, 0.40, 0.20, 0.26, 0.02};
        if (n_b > 0) {
            fill_grid(engine, dataset, n_b, 850.0, 350.0, 45.0, mix_b, n_a + 1, width);
        }
    }

    validate(dataset);
    return dataset;
}

} // namespace heatplan::geodata
