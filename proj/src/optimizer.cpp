#include "heatplan/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "heatplan/errors.hpp"
#include "heatplan/rng.hpp"

namespace heatplan::optimizer {

bool dominates(const Objectives& a, const Objectives& b) {
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) {
            return false;
        }
        if (a[i] < b[i]) {
            strictly = true;
        }
    }
    return strictly;
}

std::vector<int> non_dominated_ranks(const std::vector<Objectives>& objectives) {
    const std::size_t n = objectives.size();
    std::vector<int> ranks(n, 0);
    std::vector<int> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> dominated_by(n);
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(objectives[p], objectives[q])) {
                dominated_by[p].push_back(q);
                ++domination_count[q];
            } else if (dominates(objectives[q], objectives[p])) {
                dominated_by[q].push_back(p);
                ++domination_count[p];
            }
        }
        if (domination_count[p] == 0) {
            ranks[p] = 0;
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (domination_count[p] == 0) {
            current.push_back(p);
        }
    }
    int front = 0;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (const std::size_t p : current) {
            ranks[p] = front;
            for (const std::size_t q : dominated_by[p]) {
                if (--domination_count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        current = std::move(next);
        ++front;
    }
    return ranks;
}

std::vector<double> crowding_distance(const std::vector<Objectives>& front) {
    const std::size_t n = front.size();
    std::vector<double> distance(n, 0.0);
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), std::numeric_limits<double>::infinity());
        return distance;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t m = 0; m < 3; ++m) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return front[a][m] < front[b][m];
        });
        const double span = front[order.back()][m] - front[order.front()][m];
        distance[order.front()] = std::numeric_limits<double>::infinity();
        distance[order.back()] = std::numeric_limits<double>::infinity();
        if (span <= 0.0) {
            continue; // duplicate objective values add nothing
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            distance[order[i]] += (front[order[i + 1]][m] - front[order[i - 1]][m]) / span;
        }
    }
    return distance;
}

double hypervolume3d(const std::vector<Objectives>& points, const Objectives& reference) {
    std::vector<Objectives> inside;
    for (const auto& p : points) {
        if (p[0] < reference[0] && p[1] < reference[1] && p[2] < reference[2]) {
            inside.push_back(p);
        }
    }
    if (inside.empty()) {
        return 0.0;
    }
    std::sort(inside.begin(), inside.end(),
              [](const Objectives& a, const Objectives& b) { return a[2] < b[2]; });
    // Sweep along the third objective accumulating 2D slab areas.
    double volume = 0.0;
    for (std::size_t i = 0; i < inside.size(); ++i) {
        const double z_low = inside[i][2];
        const double z_high = i + 1 < inside.size() ? inside[i + 1][2] : reference[2];
        if (z_high <= z_low) {
            continue;
        }
        // 2D hypervolume of points 0..i projected on the first two objectives.
        std::vector<std::pair<double, double>> xy;
        for (std::size_t j = 0; j <= i; ++j) {
            xy.emplace_back(inside[j][0], inside[j][1]);
        }
        std::sort(xy.begin(), xy.end());
        double area = 0.0;
        double best_y = reference[1];
        for (const auto& [x, y] : xy) {
            if (y < best_y) {
                area += (reference[0] - x) * (best_y - y);
                best_y = y;
            }
        }
        volume += area * (z_high - z_low);
    }
    return volume;
}

namespace {

struct Individual {
    std::vector<double> genome;
    Objectives objectives{};
    int rank = 0;
    double crowding = 0.0;
};

void assign_rank_and_crowding(std::vector<Individual>& pop) {
    std::vector<Objectives> objs;
    objs.reserve(pop.size());
    for (const auto& ind : pop) {
        objs.push_back(ind.objectives);
    }
    const std::vector<int> ranks = non_dominated_ranks(objs);
    const int max_rank = ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pop[i].rank = ranks[i];
    }
    for (int front = 0; front <= max_rank; ++front) {
        std::vector<std::size_t> members;
        std::vector<Objectives> front_objs;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (pop[i].rank == front) {
                members.push_back(i);
                front_objs.push_back(pop[i].objectives);
            }
        }
        const std::vector<double> dist = crowding_distance(front_objs);
        for (std::size_t j = 0; j < members.size(); ++j) {
            pop[members[j]].crowding = dist[j];
        }
    }
}

/// Crowded-comparison: lower rank wins, then larger crowding; ties keep a.
const Individual& tournament(const Individual& a, const Individual& b) {
    if (b.rank < a.rank || (b.rank == a.rank && b.crowding > a.crowding)) {
        return b;
    }
    return a;
}

/// Deb's bounded simulated binary crossover on [0,1].
void sbx(rng::Engine& engine, double eta, double& x1, double& x2) {
    constexpr double eps = 1e-14;
    if (std::abs(x1 - x2) < eps) {
        return;
    }
    const double lo = std::min(x1, x2);
    const double hi = std::max(x1, x2);
    const double u = rng::uniform(engine);
    auto spread = [&](double beta_bound) {
        const double alpha = 2.0 - std::pow(beta_bound, -(eta + 1.0));
        if (u <= 1.0 / alpha) {
            return std::pow(u * alpha, 1.0 / (eta + 1.0));
        }
        return std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
    };
    const double range = hi - lo;
    const double beta1 = 1.0 + 2.0 * lo / range;
    const double beta2 = 1.0 + 2.0 * (1.0 - hi) / range;
    double c1 = 0.5 * (lo + hi - spread(beta1) * range);
    double c2 = 0.5 * (lo + hi + spread(beta2) * range);
    c1 = std::clamp(c1, 0.0, 1.0);
    c2 = std::clamp(c2, 0.0, 1.0);
    if (rng::uniform(engine) < 0.5) {
        std::swap(c1, c2);
    }
    x1 = c1;
    x2 = c2;
}

/// Deb's bounded polynomial mutation on [0,1].
void polynomial_mutation(rng::Engine& engine, double eta, double rate, std::vector<double>& genome) {
    for (auto& x : genome) {
        if (rng::uniform(engine) >= rate) {
            continue;
        }
        const double u = rng::uniform(engine);
        double delta;
        if (u < 0.5) {
            const double b = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - x, eta + 1.0);
            delta = std::pow(b, 1.0 / (eta + 1.0)) - 1.0;
        } else {
            const double b = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(x, eta + 1.0);
            delta = 1.0 - std::pow(b, 1.0 / (eta + 1.0));
        }
        x = std::clamp(x + delta, 0.0, 1.0);
    }
}

class Archive {
public:
    void insert(const Individual& ind, std::uint64_t config_id) {
        for (const auto& e : entries_) {
            if (dominates(e.objectives, ind.objectives) || e.objectives == ind.objectives) {
                return;
            }
        }
        std::erase_if(entries_, [&](const ArchiveEntry& e) {
            return dominates(ind.objectives, e.objectives);
        });
        entries_.push_back({config_id, ind.genome, ind.objectives});
    }

    const std::vector<ArchiveEntry>& entries() const { return entries_; }

private:
    std::vector<ArchiveEntry> entries_;
};

} // namespace

std::vector<ArchiveEntry> evolve(const Evaluator& evaluator, std::size_t n_combos,
                                 const EvolveOptions& options, std::uint64_t seed) {
    if (n_combos == 0) {
        throw ArgumentError("evolve: need at least one combo");
    }
    if (options.population_size < 4 || options.population_size % 2 != 0) {
        throw ArgumentError("evolve: population size must be even and >= 4");
    }
    const std::size_t genome_length = 3 * n_combos;
    rng::Engine engine(seed);
    std::uint64_t evaluations = 0;
    Archive archive;

    auto evaluate = [&](Individual& ind) {
        ind.objectives = evaluator(ind.genome);
        archive.insert(ind, evaluations++);
    };

    std::vector<Individual> population(options.population_size);
    for (auto& ind : population) {
        ind.genome.resize(genome_length);
        for (auto& gene : ind.genome) {
            gene = rng::uniform(engine);
        }
    }
    if (options.seed_known_solutions) {
        // All-gas, zero-PV genome: the known zero-investment anchor.
        const std::size_t slot = rng::uniform_index(engine, options.population_size);
        std::fill(population[slot].genome.begin(), population[slot].genome.end(), 0.0);
    }
    for (auto& ind : population) {
        evaluate(ind);
    }
    assign_rank_and_crowding(population);

    const double mutation_rate = 1.0 / double(genome_length);
    for (std::size_t generation = 1; generation <= options.generations; ++generation) {
        std::vector<Individual> offspring;
        offspring.reserve(options.population_size);
        while (offspring.size() < options.population_size) {
            const Individual& p1 = tournament(
                population[rng::uniform_index(engine, population.size())],
                population[rng::uniform_index(engine, population.size())]);
            const Individual& p2 = tournament(
                population[rng::uniform_index(engine, population.size())],
                population[rng::uniform_index(engine, population.size())]);
            Individual c1{p1.genome, {}, 0, 0.0};
            Individual c2{p2.genome, {}, 0, 0.0};
            if (rng::uniform(engine) < options.crossover_prob) {
                for (std::size_t g = 0; g < genome_length; ++g) {
                    if (rng::uniform(engine) < 0.5) {
                        sbx(engine, options.eta_crossover, c1.genome[g], c2.genome[g]);
                    }
                }
            }
            polynomial_mutation(engine, options.eta_mutation, mutation_rate, c1.genome);
            polynomial_mutation(engine, options.eta_mutation, mutation_rate, c2.genome);
            evaluate(c1);
            evaluate(c2);
            offspring.push_back(std::move(c1));
            offspring.push_back(std::move(c2));
        }

        // (mu + lambda) survival: best fronts, crowding-truncated.
        std::vector<Individual> combined = std::move(population);
        combined.insert(combined.end(), std::make_move_iterator(offspring.begin()),
                        std::make_move_iterator(offspring.end()));
        assign_rank_and_crowding(combined);
        std::vector<std::size_t> order(combined.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (combined[a].rank != combined[b].rank) {
                return combined[a].rank < combined[b].rank;
            }
            return combined[a].crowding > combined[b].crowding;
        });
        population.clear();
        population.reserve(options.population_size);
        for (std::size_t i = 0; i < options.population_size; ++i) {
            population.push_back(std::move(combined[order[i]]));
        }
        assign_rank_and_crowding(population);

        if (options.log && generation % options.log_every == 0) {
            *options.log << "generation " << generation << ": archive "
                         << archive.entries().size() << " points, " << evaluations
                         << " evaluations\n";
        }
        if (options.on_generation) {
            options.on_generation(generation, archive.entries());
        }
    }
    return archive.entries();
}

} // namespace heatplan::optimizer
