#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace heatplan::optimizer {

using Objectives = std::array<double, 3>; ///< all minimized

/// True iff a dominates b: a <= b everywhere and a < b somewhere.
bool dominates(const Objectives& a, const Objectives& b);

/// Fast non-dominated sorting; returns the front rank of every point
/// (0 = Pareto front of the set).
std::vector<int> non_dominated_ranks(const std::vector<Objectives>& objectives);

/// Crowding distance within one front; boundary points get +infinity.
std::vector<double> crowding_distance(const std::vector<Objectives>& front);

/// Exact hypervolume of a minimization set against a reference point
/// (points not dominating ref contribute nothing). Sweep over the third
/// objective with a 2D staircase per slice.
double hypervolume3d(const std::vector<Objectives>& points, const Objectives& reference);

struct ArchiveEntry {
    std::uint64_t config_id = 0; ///< evaluation counter at insertion
    std::vector<double> genome;
    Objectives objectives{};
};

using Evaluator = std::function<Objectives(std::span<const double>)>;

struct EvolveOptions {
    std::size_t population_size = 16;
    std::size_t generations = 2000;
    double crossover_prob = 0.9;
    double eta_crossover = 15.0;
    double eta_mutation = 20.0;
    bool seed_known_solutions = false; ///< inject the all-zero genome
    std::ostream* log = nullptr;
    std::size_t log_every = 100;
    /// Observer called after every generation with the current archive.
    std::function<void(std::size_t, const std::vector<ArchiveEntry>&)> on_generation;
};

/// NSGA-II over [0,1]^(3*n_combos): binary tournament on (rank, crowding),
/// simulated binary crossover, polynomial mutation, (mu+lambda) elitist
/// survival. Returns the unbounded archive of all non-dominated evaluated
/// points (duplicate objective vectors keep the first). Deterministic for a
/// fixed seed.
std::vector<ArchiveEntry> evolve(const Evaluator& evaluator, std::size_t n_combos,
                                 const EvolveOptions& options, std::uint64_t seed);

} // namespace heatplan::optimizer
