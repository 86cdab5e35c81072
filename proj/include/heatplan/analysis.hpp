#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "heatplan/clustering.hpp"
#include "heatplan/esm.hpp"
#include "heatplan/geodata.hpp"
#include "heatplan/optimizer.hpp"

namespace heatplan::analysis {

enum class Technology { HN, HP, GB };

std::string to_string(Technology tech);

struct BuildingAssignment {
    Technology technology = Technology::GB;
    double pv_fraction = 0.0;
};

/// Every real building inherits the rounded technology and q_PV of its
/// (category, group) combo.
std::vector<BuildingAssignment> decompress(std::span<const double> genome,
                                           const clustering::Aggregation& aggregation);

struct SolutionSelection {
    std::string filter;
    std::uint64_t config_id = 0;
    std::size_t archive_index = 0;
    std::size_t n_hn = 0;
    std::size_t n_hp = 0;
    std::size_t n_gb = 0;
    esm::KpiTriple kpis;
};

/// Lowest invest among points with energy costs strictly under the cap;
/// ties break by emissions, then config id. Empty optional if nothing
/// qualifies.
std::optional<SolutionSelection> select_low_invest_under_cost_cap(
    const std::vector<optimizer::ArchiveEntry>& archive,
    const clustering::Aggregation& aggregation, double cap_eur_per_pers);

/// Lowest invest among points whose decompressed building shares reach
/// min_share for both heat network and heat pump.
std::optional<SolutionSelection> select_min_shares(
    const std::vector<optimizer::ArchiveEntry>& archive,
    const clustering::Aggregation& aggregation, double min_share);

struct TechnologyShares {
    double gb = 0.0;
    double hp = 0.0;
    double hn = 0.0;
};

/// Per-configuration global technology shares over real buildings; the three
/// values sum to one.
std::vector<TechnologyShares> technology_share_triangle(
    const std::vector<optimizer::ArchiveEntry>& archive,
    const clustering::Aggregation& aggregation);

struct ConsistencyRow {
    Technology technology;
    double consistent_fraction = 0.0;
    double random_baseline = 0.0; ///< product of per-method shares
};

/// Fraction of buildings assigned the same technology across all given
/// assignments, against the independent-random baseline.
std::vector<ConsistencyRow> consistency(const std::vector<std::vector<BuildingAssignment>>& runs);

void export_assignment_geojson(const geodata::Dataset& dataset,
                               const std::vector<BuildingAssignment>& assignments,
                               const std::filesystem::path& path);

std::vector<BuildingAssignment> load_assignment_geojson(const std::filesystem::path& path);

void export_shares_csv(const std::vector<optimizer::ArchiveEntry>& archive,
                       const std::vector<TechnologyShares>& shares,
                       const std::filesystem::path& path);

void export_consistency_csv(const std::vector<ConsistencyRow>& rows,
                            const std::filesystem::path& path);

void export_archive_csv(const std::vector<optimizer::ArchiveEntry>& archive,
                        const clustering::Aggregation& aggregation,
                        const std::filesystem::path& path);

std::vector<optimizer::ArchiveEntry> load_archive_csv(const std::filesystem::path& path);

void export_selection_csv(const std::vector<SolutionSelection>& selections,
                          const std::filesystem::path& path);

} // namespace heatplan::analysis
