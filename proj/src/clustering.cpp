#include "heatplan/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "heatplan/csv.hpp"
#include "heatplan/errors.hpp"
#include "heatplan/rng.hpp"

namespace heatplan::clustering {

namespace {

constexpr double kShiftTolerance = 1e-6;
constexpr int kMaxIterations = 300;

// ---------------------------------------------------------------------------
// Unified Lloyd core over mixed numeric/categorical data. kmeans, kmodes and
// kprototypes are thin views of this, which is what makes the reduction
// identities (gamma = 0, zero numeric variance) exact by construction.
// ---------------------------------------------------------------------------

struct LloydResult {
    std::vector<int> labels;
    std::vector<std::vector<double>> centers;
    std::vector<std::vector<int>> modes;
    double cost = 0.0;
    int iterations = 0;
};

struct LloydProblem {
    const std::vector<std::vector<double>>& numeric;     // n x d (d may be 0)
    const std::vector<std::vector<int>>& categorical;    // n x m (m may be 0)
    double gamma = 0.0;
    int k = 0;
};

double point_center_cost(const LloydProblem& p, std::size_t i,
                         const std::vector<double>& center, const std::vector<int>& mode) {
    double cost = 0.0;
    if (!p.numeric.empty()) {
        const auto& x = p.numeric[i];
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double diff = x[d] - center[d];
            cost += diff * diff;
        }
    }
    if (!p.categorical.empty() && p.gamma != 0.0) {
        const auto& c = p.categorical[i];
        int mismatches = 0;
        for (std::size_t m = 0; m < c.size(); ++m) {
            mismatches += c[m] != mode[m];
        }
        cost += p.gamma * mismatches;
    }
    return cost;
}

void center_from_point(const LloydProblem& p, std::size_t i, std::vector<double>& center,
                       std::vector<int>& mode) {
    if (!p.numeric.empty()) {
        center = p.numeric[i];
    }
    if (!p.categorical.empty()) {
        mode = p.categorical[i];
    }
}

LloydResult lloyd_single(const LloydProblem& p, std::uint64_t seed) {
    const std::size_t n = std::max(p.numeric.size(), p.categorical.size());
    rng::Engine engine(seed);
    const std::size_t nd = p.numeric.empty() ? 0 : p.numeric.front().size();
    const std::size_t nm = p.categorical.empty() ? 0 : p.categorical.front().size();

    std::vector<std::vector<double>> centers(p.k, std::vector<double>(nd, 0.0));
    std::vector<std::vector<int>> modes(p.k, std::vector<int>(nm, 0));

    // k-means++ seeding on the combined cost. One engine draw per center.
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    {
        const std::size_t first = rng::uniform_index(engine, n);
        center_from_point(p, first, centers[0], modes[0]);
        for (int c = 1; c < p.k; ++c) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                nearest[i] = std::min(nearest[i], point_center_cost(p, i, centers[c - 1], modes[c - 1]));
                total += nearest[i];
            }
            const double u = rng::uniform(engine);
            std::size_t pick = 0;
            if (total > 0.0) {
                double acc = 0.0;
                const double target = u * total;
                for (std::size_t i = 0; i < n; ++i) {
                    acc += nearest[i];
                    if (acc > target) {
                        pick = i;
                        break;
                    }
                    pick = i;
                }
            } else {
                pick = std::size_t(u * double(n));
                pick = std::min(pick, n - 1);
            }
            center_from_point(p, pick, centers[c], modes[c]);
        }
    }

    std::vector<int> labels(n, 0);
    std::vector<double> assign_cost(n, 0.0);
    std::vector<std::size_t> counts(p.k, 0);
    int iteration = 0;

    for (iteration = 1; iteration <= kMaxIterations; ++iteration) {
        // Assignment step; ties break toward the lowest center index.
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_c = 0;
            for (int c = 0; c < p.k; ++c) {
                const double cost = point_center_cost(p, i, centers[c], modes[c]);
                if (cost < best) {
                    best = cost;
                    best_c = c;
                }
            }
            labels[i] = best_c;
            assign_cost[i] = best;
        }

        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[labels[i]];
        }
        // Re-seed empty clusters at the farthest point from its center.
        for (int c = 0; c < p.k; ++c) {
            if (counts[c] != 0) {
                continue;
            }
            std::size_t farthest = 0;
            double worst = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (counts[labels[i]] > 1 && assign_cost[i] > worst) {
                    worst = assign_cost[i];
                    farthest = i;
                }
            }
            --counts[labels[farthest]];
            labels[farthest] = c;
            counts[c] = 1;
            center_from_point(p, farthest, centers[c], modes[c]);
            assign_cost[farthest] = 0.0;
        }

        // Update step.
        double max_shift_sq = 0.0;
        bool modes_changed = false;
        std::vector<double> mean(nd, 0.0);
        for (int c = 0; c < p.k; ++c) {
            if (nd > 0) {
                std::fill(mean.begin(), mean.end(), 0.0);
                for (std::size_t i = 0; i < n; ++i) {
                    if (labels[i] != c) {
                        continue;
                    }
                    for (std::size_t d = 0; d < nd; ++d) {
                        mean[d] += p.numeric[i][d];
                    }
                }
                double shift_sq = 0.0;
                for (std::size_t d = 0; d < nd; ++d) {
                    mean[d] /= double(counts[c]);
                    const double diff = mean[d] - centers[c][d];
                    shift_sq += diff * diff;
                }
                max_shift_sq = std::max(max_shift_sq, shift_sq);
                centers[c] = mean;
            }
            if (nm > 0) {
                for (std::size_t m = 0; m < nm; ++m) {
                    // Majority value; ties break toward the smallest code.
                    std::unordered_map<int, std::size_t> freq;
                    for (std::size_t i = 0; i < n; ++i) {
                        if (labels[i] == c) {
                            ++freq[p.categorical[i][m]];
                        }
                    }
                    int best_value = 0;
                    std::size_t best_count = 0;
                    for (const auto& [value, count] : freq) {
                        if (count > best_count || (count == best_count && value < best_value)) {
                            best_count = count;
                            best_value = value;
                        }
                    }
                    if (modes[c][m] != best_value) {
                        modes_changed = true;
                        modes[c][m] = best_value;
                    }
                }
            }
        }

        const bool centers_converged = max_shift_sq < kShiftTolerance * kShiftTolerance;
        const bool modes_converged = p.gamma == 0.0 || nm == 0 || !modes_changed;
        if (centers_converged && modes_converged) {
            break;
        }
    }

    LloydResult result;
    result.labels = std::move(labels);
    result.centers = std::move(centers);
    result.modes = std::move(modes);
    result.iterations = std::min(iteration, kMaxIterations);
    for (std::size_t i = 0; i < n; ++i) {
        result.cost += point_center_cost(p, i, result.centers[result.labels[i]],
                                         result.modes[result.labels[i]]);
    }
    return result;
}

constexpr int kRestarts = 10;

/// Best of kRestarts independent k-means++ starts (lowest final cost, ties
/// keep the earliest start).
LloydResult lloyd(const LloydProblem& p, std::uint64_t seed) {
    const std::size_t n = std::max(p.numeric.size(), p.categorical.size());
    if (p.k < 1) {
        throw ArgumentError("clustering: k must be >= 1");
    }
    if (std::size_t(p.k) > n) {
        throw ArgumentError("clustering: k exceeds the number of points");
    }
    LloydResult best;
    for (int restart = 0; restart < kRestarts; ++restart) {
        LloydResult run = lloyd_single(p, rng::mix(seed, std::uint64_t(restart)));
        if (restart == 0 || run.cost < best.cost) {
            best = std::move(run);
        }
    }
    return best;
}

const std::vector<std::vector<double>> kNoNumeric;
const std::vector<std::vector<int>> kNoCategorical;

} // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed) {
    if (points.empty()) {
        throw ArgumentError("kmeans: empty input");
    }
    LloydResult r = lloyd({points, kNoCategorical, 0.0, k}, seed);
    return {std::move(r.labels), std::move(r.centers), r.cost, r.iterations};
}

KModesResult kmodes(const std::vector<std::vector<int>>& rows, int k, std::uint64_t seed) {
    if (rows.empty()) {
        throw ArgumentError("kmodes: empty input");
    }
    LloydResult r = lloyd({kNoNumeric, rows, 1.0, k}, seed);
    return {std::move(r.labels), std::move(r.modes), r.cost, r.iterations};
}

KPrototypesResult kprototypes(const std::vector<std::vector<double>>& numeric,
                              const std::vector<std::vector<int>>& categorical, int k,
                              std::optional<double> gamma, std::uint64_t seed) {
    if (numeric.empty() || categorical.empty() || numeric.size() != categorical.size()) {
        throw ArgumentError("kprototypes: numeric and categorical parts must cover the same points");
    }
    double g;
    if (gamma) {
        if (*gamma < 0.0) {
            throw ArgumentError("kprototypes: gamma must be >= 0");
        }
        g = *gamma;
    } else {
        // Huang's heuristic: half the mean standard deviation of the numeric part.
        const std::size_t n = numeric.size();
        const std::size_t nd = numeric.front().size();
        double mean_sd = 0.0;
        for (std::size_t d = 0; d < nd; ++d) {
            double mean = 0.0, sq = 0.0;
            for (const auto& row : numeric) {
                mean += row[d];
            }
            mean /= double(n);
            for (const auto& row : numeric) {
                sq += (row[d] - mean) * (row[d] - mean);
            }
            mean_sd += std::sqrt(sq / double(n));
        }
        g = 0.5 * mean_sd / double(nd);
    }
    LloydResult r = lloyd({numeric, categorical, g, k}, seed);
    return {std::move(r.labels), std::move(r.centers), std::move(r.modes), g, r.cost, r.iterations};
}

// ---------------------------------------------------------------------------
// HDBSCAN
// ---------------------------------------------------------------------------

namespace {

struct CondensedCluster {
    int parent = -1;
    double birth_lambda = 0.0;
    std::vector<std::pair<int, double>> points; // (point index, departure lambda)
    std::vector<int> children;
};

double lambda_of(double distance) {
    return distance > 0.0 ? 1.0 / distance : std::numeric_limits<double>::infinity();
}

} // namespace

std::vector<int> hdbscan(const std::vector<std::array<double, 2>>& points, int min_cluster_size) {
    if (min_cluster_size < 1) {
        throw ArgumentError("hdbscan: min_cluster_size must be >= 1");
    }
    const std::size_t n = points.size();
    std::vector<int> labels(n, -1);
    if (n < std::size_t(min_cluster_size) || n < 2) {
        return labels;
    }

    // Core distance: distance to the min_cluster_size-th nearest neighbour,
    // counting the point itself.
    std::vector<double> core(n, 0.0);
    {
        std::vector<double> dist(n, 0.0);
        const std::size_t kth = std::size_t(min_cluster_size) - 1;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                dist[j] = std::hypot(points[i][0] - points[j][0], points[i][1] - points[j][1]);
            }
            std::nth_element(dist.begin(), dist.begin() + kth, dist.end());
            core[i] = dist[kth];
        }
    }

    // Prim MST over mutual reachability distances.
    struct MstEdge {
        std::size_t a, b;
        double weight;
    };
    std::vector<MstEdge> mst_edges;
    mst_edges.reserve(n - 1);
    {
        std::vector<bool> in_tree(n, false);
        std::vector<double> best(n, std::numeric_limits<double>::infinity());
        std::vector<std::size_t> from(n, 0);
        in_tree[0] = true;
        std::size_t current = 0;
        for (std::size_t added = 1; added < n; ++added) {
            for (std::size_t j = 0; j < n; ++j) {
                if (in_tree[j]) {
                    continue;
                }
                const double d = std::hypot(points[current][0] - points[j][0],
                                            points[current][1] - points[j][1]);
                const double mr = std::max({d, core[current], core[j]});
                if (mr < best[j]) {
                    best[j] = mr;
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
            mst_edges.push_back({from[next], next, next_w});
            in_tree[next] = true;
            current = next;
        }
    }
    std::stable_sort(mst_edges.begin(), mst_edges.end(),
                     [](const MstEdge& a, const MstEdge& b) { return a.weight < b.weight; });

    // Single-linkage hierarchy: leaves 0..n-1, internal nodes n..2n-2.
    const std::size_t total_nodes = 2 * n - 1;
    std::vector<int> left(total_nodes, -1), right(total_nodes, -1);
    std::vector<double> merge_distance(total_nodes, 0.0);
    std::vector<std::size_t> size(total_nodes, 1);
    {
        std::vector<std::size_t> component(n);
        std::iota(component.begin(), component.end(), 0);
        std::vector<std::size_t> root_of(total_nodes);
        std::iota(root_of.begin(), root_of.end(), 0);
        // Union-find with path compression over component representatives.
        std::vector<std::size_t> parent_uf(n);
        std::iota(parent_uf.begin(), parent_uf.end(), 0);
        auto find = [&](std::size_t x) {
            while (parent_uf[x] != x) {
                parent_uf[x] = parent_uf[parent_uf[x]];
                x = parent_uf[x];
            }
            return x;
        };
        std::size_t next_node = n;
        for (const auto& edge : mst_edges) {
            const std::size_t ra = find(edge.a);
            const std::size_t rb = find(edge.b);
            const std::size_t node = next_node++;
            left[node] = int(root_of[ra]);
            right[node] = int(root_of[rb]);
            merge_distance[node] = edge.weight;
            size[node] = size[root_of[ra]] + size[root_of[rb]];
            parent_uf[ra] = rb;
            root_of[rb] = node;
        }
    }

    // Condense the hierarchy by min_cluster_size.
    std::vector<CondensedCluster> clusters;
    clusters.push_back({-1, 0.0, {}, {}});
    {
        auto collect_leaves = [&](int node, double lambda, CondensedCluster& cluster) {
            std::vector<int> stack{node};
            while (!stack.empty()) {
                const int v = stack.back();
                stack.pop_back();
                if (v < int(n)) {
                    cluster.points.emplace_back(v, lambda);
                } else {
                    stack.push_back(left[v]);
                    stack.push_back(right[v]);
                }
            }
        };
        struct WalkItem {
            int node;
            int cluster;
        };
        std::vector<WalkItem> stack{{int(total_nodes - 1), 0}};
        while (!stack.empty()) {
            const auto [node, cluster_idx] = stack.back();
            stack.pop_back();
            if (node < int(n)) {
                // A singleton component reached as "the cluster itself".
                clusters[cluster_idx].points.emplace_back(node, lambda_of(0.0));
                continue;
            }
            const double lambda = lambda_of(merge_distance[node]);
            const int l = left[node];
            const int r = right[node];
            const bool l_big = size[l] >= std::size_t(min_cluster_size);
            const bool r_big = size[r] >= std::size_t(min_cluster_size);
            if (l_big && r_big) {
                for (const int child_node : {l, r}) {
                    const int child_idx = int(clusters.size());
                    clusters.push_back({cluster_idx, lambda, {}, {}});
                    clusters[cluster_idx].children.push_back(child_idx);
                    stack.push_back({child_node, child_idx});
                }
            } else if (l_big || r_big) {
                collect_leaves(l_big ? r : l, lambda, clusters[cluster_idx]);
                stack.push_back({l_big ? l : r, cluster_idx});
            } else {
                collect_leaves(l, lambda, clusters[cluster_idx]);
                collect_leaves(r, lambda, clusters[cluster_idx]);
            }
        }
    }

    // Stability and excess-of-mass selection; the root is never selectable.
    const std::size_t nc = clusters.size();
    std::vector<double> stability(nc, 0.0);
    std::vector<std::size_t> subtree_points(nc, 0);
    for (std::size_t c = nc; c-- > 0;) {
        subtree_points[c] = clusters[c].points.size();
        for (const int child : clusters[c].children) {
            subtree_points[c] += subtree_points[child];
        }
        double s = 0.0;
        for (const auto& [point, lambda] : clusters[c].points) {
            (void)point;
            if (std::isfinite(lambda)) {
                s += lambda - clusters[c].birth_lambda;
            }
        }
        for (const int child : clusters[c].children) {
            const double gap = clusters[child].birth_lambda - clusters[c].birth_lambda;
            if (std::isfinite(gap)) {
                s += double(subtree_points[child]) * gap;
            }
        }
        stability[c] = s;
    }

    std::vector<bool> selected(nc, false);
    std::vector<double> subtree_stability(nc, 0.0);
    for (std::size_t c = nc; c-- > 0;) {
        double child_sum = 0.0;
        for (const int child : clusters[c].children) {
            child_sum += subtree_stability[child];
        }
        if (c == 0) {
            break; // root stays unselected
        }
        if (clusters[c].children.empty() || stability[c] >= child_sum) {
            selected[c] = true;
            // Deselect every descendant.
            std::vector<int> stack(clusters[c].children);
            while (!stack.empty()) {
                const int v = stack.back();
                stack.pop_back();
                selected[v] = false;
                stack.insert(stack.end(), clusters[v].children.begin(), clusters[v].children.end());
            }
            subtree_stability[c] = stability[c];
        } else {
            subtree_stability[c] = child_sum;
        }
    }

    std::vector<int> flat_label(nc, -1);
    int next_label = 0;
    for (std::size_t c = 1; c < nc; ++c) {
        if (selected[c]) {
            flat_label[c] = next_label++;
        }
    }
    for (std::size_t c = 0; c < nc; ++c) {
        int ancestor = int(c);
        while (ancestor >= 0 && !selected[ancestor]) {
            ancestor = clusters[ancestor].parent;
        }
        if (ancestor < 0) {
            continue;
        }
        for (const auto& [point, lambda] : clusters[c].points) {
            (void)lambda;
            labels[point] = flat_label[ancestor];
        }
    }
    return labels;
}

// ---------------------------------------------------------------------------
// Two-step pipeline
// ---------------------------------------------------------------------------

CategoryModel category_model_from_labels(const std::vector<features::FeatureVector>& vectors,
                                         const std::vector<double>& footprints,
                                         const std::vector<int>& labels) {
    if (vectors.empty() || vectors.size() != footprints.size() || labels.size() != vectors.size()) {
        throw ArgumentError("category_model_from_labels: input sizes must match");
    }
    CategoryModel model;
    model.k = 1 + *std::max_element(labels.begin(), labels.end());
    model.labels = labels;
    model.member_count.assign(model.k, 0);
    model.plain.assign(model.k, {});
    model.weighted.assign(model.k, {});

    std::vector<std::array<double, 7>> plain_acc(model.k, std::array<double, 7>{});
    std::vector<std::array<double, 6>> weighted_acc(model.k, std::array<double, 6>{});
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const int c = model.labels[i];
        if (c < 0) {
            throw ArgumentError("category_model_from_labels: negative category label");
        }
        ++model.member_count[c];
        const auto v = vectors[i].as_array();
        const double area = footprints[i];
        plain_acc[c][0] += area;
        weighted_acc[c][0] += area;
        for (int d = 0; d < 5; ++d) {
            plain_acc[c][1 + d] += v[d];
            weighted_acc[c][1 + d] += area * v[d];
        }
    }
    for (int c = 0; c < model.k; ++c) {
        if (model.member_count[c] == 0) {
            throw ArgumentError("category_model_from_labels: empty category " + std::to_string(c));
        }
        const double count = double(model.member_count[c]);
        const double total_area = plain_acc[c][0];
        auto fill = [](CategoryRepresentative& rep, double area, const double* sums, double denom) {
            rep.footprint_m2 = area;
            rep.specific.q_heat = sums[0] / denom;
            rep.specific.p9 = sums[1] / denom;
            rep.specific.p12 = sums[2] / denom;
            rep.specific.p15 = sums[3] / denom;
            rep.specific.c_hnc = sums[4] / denom;
        };
        fill(model.plain[c], total_area / count, &plain_acc[c][1], count);
        fill(model.weighted[c], total_area / count, &weighted_acc[c][1], total_area);
    }
    return model;
}

CategoryModel build_categories(const std::vector<features::FeatureVector>& vectors,
                               const std::vector<double>& footprints, int k_reps,
                               std::uint64_t seed) {
    if (vectors.empty() || vectors.size() != footprints.size()) {
        throw ArgumentError("build_categories: features and footprints must match");
    }
    std::vector<std::vector<double>> raw;
    raw.reserve(vectors.size());
    for (const auto& f : vectors) {
        const auto a = f.as_array();
        raw.emplace_back(a.begin(), a.end());
    }
    const features::MinMaxScaler scaler = features::fit_minmax(raw);
    const auto norm = features::apply_minmax_all(raw, scaler);

    KMeansResult km = kmeans(norm, k_reps, seed);
    CategoryModel model = category_model_from_labels(vectors, footprints, km.labels);
    model.centers_norm = std::move(km.centers);
    return model;
}

std::string to_string(GroupingMethod method) {
    switch (method) {
    case GroupingMethod::kmeans_geo: return "kmeans_geo";
    case GroupingMethod::kmeans_energy: return "kmeans_energy";
    case GroupingMethod::kprototypes: return "kprototypes";
    case GroupingMethod::kprototypes_hdbscan: return "kprototypes_hdbscan";
    case GroupingMethod::kmodes: return "kmodes";
    }
    return "unknown";
}

GroupingMethod grouping_method_from_string(const std::string& name) {
    if (name == "kmeans_geo") return GroupingMethod::kmeans_geo;
    if (name == "kmeans_energy") return GroupingMethod::kmeans_energy;
    if (name == "kprototypes") return GroupingMethod::kprototypes;
    if (name == "kprototypes_hdbscan") return GroupingMethod::kprototypes_hdbscan;
    if (name == "kmodes") return GroupingMethod::kmodes;
    throw ArgumentError("unknown grouping method '" + name + "'");
}

void rebuild_combos(Aggregation& aggregation) {
    const std::size_t n = aggregation.category.size();
    std::unordered_map<long, std::size_t> index;
    aggregation.combos.clear();
    aggregation.combo_of_building.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const long key = long(aggregation.category[i]) * 1000000L + long(aggregation.group[i]);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, aggregation.combos.size()).first;
            aggregation.combos.push_back({aggregation.category[i], aggregation.group[i], 0});
        }
        ++aggregation.combos[it->second].count;
        aggregation.combo_of_building[i] = it->second;
    }
    // Deterministic combo order regardless of building order.
    std::vector<std::size_t> order(aggregation.combos.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& ca = aggregation.combos[a];
        const auto& cb = aggregation.combos[b];
        return std::tie(ca.category, ca.group) < std::tie(cb.category, cb.group);
    });
    std::vector<Aggregation::Combo> sorted;
    sorted.reserve(order.size());
    std::vector<std::size_t> new_index(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        new_index[order[pos]] = pos;
        sorted.push_back(aggregation.combos[order[pos]]);
    }
    aggregation.combos = std::move(sorted);
    for (auto& idx : aggregation.combo_of_building) {
        idx = new_index[idx];
    }
}

namespace {

/// Per-category HDBSCAN labels as one categorical column. Clusters are
/// namespaced per category; noise shares one code per category; categories
/// smaller than min_cluster_size get one code per building.
std::vector<int> hdbscan_column(const geodata::Dataset& dataset, const CategoryModel& categories,
                                int min_cluster_size) {
    const std::size_t n = dataset.buildings.size();
    std::vector<int> column(n, 0);
    int next_code = 0;
    for (int c = 0; c < categories.k; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (categories.labels[i] == c) {
                members.push_back(i);
            }
        }
        if (members.size() < std::size_t(min_cluster_size)) {
            for (const std::size_t i : members) {
                column[i] = next_code++;
            }
            continue;
        }
        std::vector<std::array<double, 2>> pts;
        pts.reserve(members.size());
        for (const std::size_t i : members) {
            pts.push_back({dataset.buildings[i].x_m, dataset.buildings[i].y_m});
        }
        const std::vector<int> labels = hdbscan(pts, min_cluster_size);
        const int max_label = labels.empty() ? -1 : *std::max_element(labels.begin(), labels.end());
        const int noise_code = next_code + max_label + 1;
        for (std::size_t j = 0; j < members.size(); ++j) {
            column[members[j]] = labels[j] >= 0 ? next_code + labels[j] : noise_code;
        }
        next_code = noise_code + 1;
    }
    return column;
}

std::vector<std::vector<double>> normalized_coordinates(const geodata::Dataset& dataset) {
    std::vector<std::vector<double>> coords;
    coords.reserve(dataset.buildings.size());
    for (const auto& b : dataset.buildings) {
        coords.push_back({b.x_m, b.y_m});
    }
    return features::apply_minmax_all(coords, features::fit_minmax(coords));
}

} // namespace

Aggregation group_buildings(GroupingMethod method, const geodata::Dataset& dataset,
                            const std::vector<features::FeatureVector>& vectors,
                            const CategoryModel& categories, int k_groups, std::uint64_t seed,
                            int min_cluster_size) {
    const std::size_t n = dataset.buildings.size();
    if (vectors.size() != n || categories.labels.size() != n) {
        throw ArgumentError("group_buildings: dataset, features and categories must match");
    }
    if (k_groups < 1) {
        throw ArgumentError("group_buildings: k_groups must be >= 1");
    }

    Aggregation aggregation;
    aggregation.method = method;
    aggregation.category = categories.labels;
    aggregation.k_categories = categories.k;
    aggregation.k_groups = k_groups;

    switch (method) {
    case GroupingMethod::kmeans_geo: {
        aggregation.group = kmeans(normalized_coordinates(dataset), k_groups, seed).labels;
        break;
    }
    case GroupingMethod::kmeans_energy: {
        std::vector<std::vector<double>> data;
        data.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto f = vectors[i].as_array();
            data.push_back({dataset.buildings[i].x_m, dataset.buildings[i].y_m, f[0], f[1], f[2],
                            f[3], f[4]});
        }
        data = features::apply_minmax_all(data, features::fit_minmax(data));
        aggregation.group = kmeans(data, k_groups, seed).labels;
        break;
    }
    case GroupingMethod::kprototypes: {
        std::vector<std::vector<int>> cats(n, std::vector<int>(1, 0));
        for (std::size_t i = 0; i < n; ++i) {
            cats[i][0] = categories.labels[i];
        }
        aggregation.group =
            kprototypes(normalized_coordinates(dataset), cats, k_groups, std::nullopt, seed).labels;
        break;
    }
    case GroupingMethod::kprototypes_hdbscan: {
        const auto hdb = hdbscan_column(dataset, categories, min_cluster_size);
        std::vector<std::vector<int>> cats(n, std::vector<int>(2, 0));
        for (std::size_t i = 0; i < n; ++i) {
            cats[i][0] = categories.labels[i];
            cats[i][1] = hdb[i];
        }
        aggregation.group =
            kprototypes(normalized_coordinates(dataset), cats, k_groups, std::nullopt, seed).labels;
        break;
    }
    case GroupingMethod::kmodes: {
        const auto hdb = hdbscan_column(dataset, categories, min_cluster_size);
        std::vector<std::vector<int>> rows(n, std::vector<int>(2, 0));
        for (std::size_t i = 0; i < n; ++i) {
            rows[i][0] = categories.labels[i];
            rows[i][1] = hdb[i];
        }
        aggregation.group = kmodes(rows, k_groups, seed).labels;
        break;
    }
    }

    rebuild_combos(aggregation);
    return aggregation;
}

void export_aggregation_csv(const geodata::Dataset& dataset, const Aggregation& aggregation,
                            const std::filesystem::path& path) {
    std::vector<std::string> lines{"id,category,group"};
    for (std::size_t i = 0; i < dataset.buildings.size(); ++i) {
        lines.push_back(dataset.buildings[i].id + ',' + std::to_string(aggregation.category[i]) +
                        ',' + std::to_string(aggregation.group[i]));
    }
    csv::write_lines(path, lines);
}

Aggregation load_aggregation_csv(const geodata::Dataset& dataset,
                                 const std::filesystem::path& path, GroupingMethod method) {
    const csv::Table table = csv::read_table(path);
    const std::string hint = path.filename().string();
    const std::size_t c_id = table.column("id", hint);
    const std::size_t c_cat = table.column("category", hint);
    const std::size_t c_grp = table.column("group", hint);
    if (table.rows.size() != dataset.buildings.size()) {
        throw ValidationError(hint + ": row count does not match the dataset");
    }
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < dataset.buildings.size(); ++i) {
        index.emplace(dataset.buildings[i].id, i);
    }
    Aggregation aggregation;
    aggregation.method = method;
    aggregation.category.assign(dataset.buildings.size(), 0);
    aggregation.group.assign(dataset.buildings.size(), 0);
    for (const auto& row : table.rows) {
        const auto it = index.find(row[c_id]);
        if (it == index.end()) {
            throw ValidationError(hint + ": unknown building id '" + row[c_id] + "'");
        }
        aggregation.category[it->second] = int(csv::parse_long(row[c_cat], hint + " category"));
        aggregation.group[it->second] = int(csv::parse_long(row[c_grp], hint + " group"));
    }
    aggregation.k_categories =
        1 + *std::max_element(aggregation.category.begin(), aggregation.category.end());
    aggregation.k_groups = 1 + *std::max_element(aggregation.group.begin(), aggregation.group.end());
    rebuild_combos(aggregation);
    return aggregation;
}

void export_scan_csv(const std::vector<ScanRow>& rows, const std::filesystem::path& path) {
    std::vector<std::string> lines{"method,k_reps,k_groups,variables,avg_line_length_m"};
    for (const auto& row : rows) {
        lines.push_back(to_string(row.method) + ',' + std::to_string(row.k_reps) + ',' +
                        std::to_string(row.k_groups) + ',' + std::to_string(row.variables) + ',' +
                        csv::format_double(row.avg_line_length_m));
    }
    csv::write_lines(path, lines);
}

} // namespace heatplan::clustering
