#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include "heatplan/clustering.hpp"
#include "heatplan/geodata.hpp"

namespace heatplan::network {

struct Edge {
    std::size_t a = 0;
    std::size_t b = 0;
    double length_m = 0.0;
};

struct NetworkEstimate {
    double total_length_m = 0.0;
    std::vector<Edge> edges; ///< point-count - 1 edges for >= 1 point
};

/// Exact Euclidean minimum spanning tree (Prim on the complete graph).
NetworkEstimate mst(std::span<const std::array<double, 2>> points);

enum class CohesionMode {
    per_building, ///< sum of group MST lengths over total building count
    per_group     ///< unweighted mean of (group MST length / group size)
};

/// Average single-group line length: heat-network length per building if
/// each geographical group were connected on its own.
double group_cohesion(const clustering::Aggregation& aggregation,
                      const geodata::Dataset& dataset,
                      CohesionMode mode = CohesionMode::per_building);

/// Total MST length over the real buildings whose (category, group) combo is
/// selected. An empty selection yields 0.
double grid_length_for_selection(const std::vector<std::pair<int, int>>& selected,
                                 const clustering::Aggregation& aggregation,
                                 const geodata::Dataset& dataset);

} // namespace heatplan::network
