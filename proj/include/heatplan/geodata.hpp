#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace heatplan::geodata {

/// One roof plane of a building.
struct RoofSegment {
    double azimuth_deg = 180.0; ///< [0, 360), 0 = north, 90 = east
    double tilt_deg = 30.0;     ///< [0, 90], 0 = horizontal
    double area_m2 = 0.0;       ///< > 0
};

/// One real building. Coordinates are planar meters (pre-projected).
struct BuildingRecord {
    std::string id;
    double x_m = 0.0;
    double y_m = 0.0;
    double footprint_m2 = 0.0;          ///< > 0
    double annual_heat_demand_kwh = 0.0; ///< >= 0
    std::vector<RoofSegment> roofs;      ///< empty list means zero solar potential
};

struct Dataset {
    std::vector<BuildingRecord> buildings;
    std::string crs_note = "planar meters, unspecified projection";
};

enum class GeoFormat { csv, geojson };

/// Validates dataset invariants: non-empty, unique ids, positive footprints,
/// non-negative demands, roof fields in range. Throws ValidationError.
void validate(const Dataset& dataset);

/// Loads a dataset.
///  - csv: `path` is either a directory holding buildings.csv (+ optional
///    roofs.csv) or the buildings.csv file itself with roofs.csv as an
///    optional sibling.
///  - geojson: `path` is a FeatureCollection file; Point or Polygon
///    geometries (polygon centroid is used as the building coordinate).
Dataset load_dataset(const std::filesystem::path& path, GeoFormat format);

Dataset load_dataset_csv(const std::filesystem::path& buildings_csv,
                         const std::filesystem::path& roofs_csv);

/// Writes buildings.csv + roofs.csv into `dir` (csv) or dataset.geojson
/// (geojson). Returns the path of the primary file written.
std::filesystem::path export_dataset(const Dataset& dataset,
                                     const std::filesystem::path& dir,
                                     GeoFormat format);

enum class SyntheticLayout { grid, two_districts };

/// Deterministic synthetic building stock, a pure function of the arguments.
/// `two_districts` places two spatially separated populations with distinct
/// demand and roof statistics; building order is district A first. The
/// district split point is district_a_count(n).
Dataset generate_synthetic(std::uint64_t seed, std::size_t n_buildings, SyntheticLayout layout);

/// Number of buildings assigned to district A by `two_districts`.
std::size_t district_a_count(std::size_t n_buildings);

} // namespace heatplan::geodata
