#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heatplan/features.hpp"
#include "heatplan/geodata.hpp"

namespace heatplan::clustering {

struct KMeansResult {
    std::vector<int> labels;
    std::vector<std::vector<double>> centers;
    double inertia = 0.0;
    int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding, best of 10 deterministic
/// restarts by inertia. Converged when the center shift drops below 1e-6
/// (and no discrete part changed), capped at 300 iterations. Empty clusters
/// are re-seeded at the point farthest from its center; ties in
/// nearest-center assignment break toward the lowest center index.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed);

struct KModesResult {
    std::vector<int> labels;
    std::vector<std::vector<int>> modes;
    double cost = 0.0; ///< total matching dissimilarity
    int iterations = 0;
};

/// K-Modes over integer-coded categorical rows (matching dissimilarity,
/// per-attribute majority mode updates).
KModesResult kmodes(const std::vector<std::vector<int>>& rows, int k, std::uint64_t seed);

struct KPrototypesResult {
    std::vector<int> labels;
    std::vector<std::vector<double>> centers;
    std::vector<std::vector<int>> modes;
    double gamma = 0.0;
    double cost = 0.0;
    int iterations = 0;
};

/// K-Prototypes: squared Euclidean on the numeric part plus gamma times the
/// matching dissimilarity on the categorical part. gamma defaults to half the
/// mean numeric standard deviation (Huang's heuristic) when not given.
/// With gamma = 0 it reproduces kmeans labels for the same seed; with zero
/// numeric variance it reproduces kmodes labels.
KPrototypesResult kprototypes(const std::vector<std::vector<double>>& numeric,
                              const std::vector<std::vector<int>>& categorical, int k,
                              std::optional<double> gamma, std::uint64_t seed);

/// HDBSCAN flat labels over planar points; -1 marks noise. Fewer points than
/// min_cluster_size yields all noise.
std::vector<int> hdbscan(const std::vector<std::array<double, 2>>& points, int min_cluster_size);

/// One building category's stand-in building in footprint-specific units.
struct CategoryRepresentative {
    double footprint_m2 = 0.0; ///< mean member footprint
    features::FeatureVector specific;
};

/// Step-1 result: energy-feature clusters plus both representative variants
/// (plain member mean and footprint-weighted mean).
struct CategoryModel {
    int k = 0;
    std::vector<int> labels;
    std::vector<std::vector<double>> centers_norm;
    std::vector<int> member_count;
    std::vector<CategoryRepresentative> plain;
    std::vector<CategoryRepresentative> weighted;
};

CategoryModel build_categories(const std::vector<features::FeatureVector>& vectors,
                               const std::vector<double>& footprints, int k_reps,
                               std::uint64_t seed);

/// Rebuilds representatives and counts from existing labels (e.g. loaded
/// from aggregation.csv); centers_norm stays empty.
CategoryModel category_model_from_labels(const std::vector<features::FeatureVector>& vectors,
                                         const std::vector<double>& footprints,
                                         const std::vector<int>& labels);

enum class GroupingMethod { kmeans_geo, kmeans_energy, kprototypes, kprototypes_hdbscan, kmodes };

std::string to_string(GroupingMethod method);
GroupingMethod grouping_method_from_string(const std::string& name);

/// Assignment of every building to (category, group) plus occupancy counts.
struct Aggregation {
    GroupingMethod method = GroupingMethod::kmeans_geo;
    std::vector<int> category; ///< per building
    std::vector<int> group;    ///< per building
    int k_categories = 0;
    int k_groups = 0;

    struct Combo {
        int category = 0;
        int group = 0;
        int count = 0; ///< N_{b,g} > 0
    };
    std::vector<Combo> combos; ///< exactly the nonempty pairs, sorted

    /// Index into combos for a building, by its (category, group).
    std::vector<std::size_t> combo_of_building;
};

/// Recomputes combos and combo_of_building from the label vectors.
void rebuild_combos(Aggregation& aggregation);

/// Step 2: geographical grouping by the chosen method.
Aggregation group_buildings(GroupingMethod method, const geodata::Dataset& dataset,
                            const std::vector<features::FeatureVector>& vectors,
                            const CategoryModel& categories, int k_groups, std::uint64_t seed,
                            int min_cluster_size = 5);

struct ScanRow {
    GroupingMethod method;
    int k_reps = 0;
    int k_groups = 0;
    int variables = 0;
    double avg_line_length_m = 0.0;
};

struct ScanRange {
    int from = 5;
    int to = 30;
};

/// Scan over (method, k_reps, k_groups). Each grid point owns an RNG seeded
/// from (seed, method, k_reps, k_groups), so results do not depend on
/// execution order; jobs run on `threads` workers (0 = hardware default).
std::vector<ScanRow> scan(const geodata::Dataset& dataset,
                          const std::vector<features::FeatureVector>& vectors,
                          const std::vector<GroupingMethod>& methods, ScanRange reps_range,
                          ScanRange groups_range, std::uint64_t seed, int min_cluster_size = 5,
                          unsigned threads = 0);

void export_aggregation_csv(const geodata::Dataset& dataset, const Aggregation& aggregation,
                            const std::filesystem::path& path);

Aggregation load_aggregation_csv(const geodata::Dataset& dataset,
                                 const std::filesystem::path& path, GroupingMethod method);

void export_scan_csv(const std::vector<ScanRow>& rows, const std::filesystem::path& path);

} // namespace heatplan::clustering
