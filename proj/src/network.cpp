#include "heatplan/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heatplan::network {

NetworkEstimate mst(std::span<const std::array<double, 2>> points) {
    NetworkEstimate estimate;
    const std::size_t n = points.size();
    if (n <= 1) {
        return estimate;
    }
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> from(n, 0);
    in_tree[0] = true;
    std::size_t current = 0;
    estimate.edges.reserve(n - 1);
    for (std::size_t added = 1; added < n; ++added) {
        for (std::size_t j = 0; j < n; ++j) {
            if (in_tree[j]) {
                continue;
            }
            const double d =
                std::hypot(points[current][0] - points[j][0], points[current][1] - points[j][1]);
            if (d < best[j]) {
                best[j] = d;
                from[j] = current;
            }
        }
        std::size_t next = 0;
        double next_w = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) {
            if (!in_tree[j] && best[j] < next_w) {
                next_w = best[j];
                next = j;
            }
        }
        estimate.edges.push_back({from[next], next, next_w});
        estimate.total_length_m += next_w;
        in_tree[next] = true;
        current = next;
    }
    return estimate;
}

double group_cohesion(const clustering::Aggregation& aggregation, const geodata::Dataset& dataset,
                      CohesionMode mode) {
    const std::size_t n = dataset.buildings.size();
    double total_length = 0.0;
    double per_group_sum = 0.0;
    std::size_t groups_seen = 0;
    for (int g = 0; g < aggregation.k_groups; ++g) {
        std::vector<std::array<double, 2>> pts;
        for (std::size_t i = 0; i < n; ++i) {
            if (aggregation.group[i] == g) {
                pts.push_back({dataset.buildings[i].x_m, dataset.buildings[i].y_m});
            }
        }
        if (pts.empty()) {
            continue;
        }
        const double length = mst(pts).total_length_m;
        total_length += length;
        per_group_sum += length / double(pts.size());
        ++groups_seen;
    }
    if (mode == CohesionMode::per_group) {
        return groups_seen > 0 ? per_group_sum / double(groups_seen) : 0.0;
    }
    return n > 0 ? total_length / double(n) : 0.0;
}

double grid_length_for_selection(const std::vector<std::pair<int, int>>& selected,
                                 const clustering::Aggregation& aggregation,
                                 const geodata::Dataset& dataset) {
    if (selected.empty()) {
        return 0.0;
    }
    std::vector<std::array<double, 2>> pts;
    for (std::size_t i = 0; i < dataset.buildings.size(); ++i) {
        const std::pair<int, int> key{aggregation.category[i], aggregation.group[i]};
        if (std::find(selected.begin(), selected.end(), key) != selected.end()) {
            pts.push_back({dataset.buildings[i].x_m, dataset.buildings[i].y_m});
        }
    }
    return mst(pts).total_length_m;
}

} // namespace heatplan::network
