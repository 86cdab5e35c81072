#include <atomic>
#include <thread>

#include "heatplan/clustering.hpp"
#include "heatplan/errors.hpp"
#include "heatplan/network.hpp"
#include "heatplan/rng.hpp"

namespace heatplan::clustering {

std::vector<ScanRow> scan(const geodata::Dataset& dataset,
                          const std::vector<features::FeatureVector>& vectors,
                          const std::vector<GroupingMethod>& methods, ScanRange reps_range,
                          ScanRange groups_range, std::uint64_t seed, int min_cluster_size,
                          unsigned threads) {
    if (methods.empty() || reps_range.from > reps_range.to || groups_range.from > groups_range.to ||
        reps_range.from < 1 || groups_range.from < 1) {
        throw ArgumentError("scan: empty method list or invalid ranges");
    }

    struct Job {
        GroupingMethod method;
        int k_reps;
        int k_groups;
    };
    std::vector<Job> jobs;
    for (const auto method : methods) {
        for (int k_reps = reps_range.from; k_reps <= reps_range.to; ++k_reps) {
            for (int k_groups = groups_range.from; k_groups <= groups_range.to; ++k_groups) {
                jobs.push_back({method, k_reps, k_groups});
            }
        }
    }

    std::vector<double> footprints;
    footprints.reserve(dataset.buildings.size());
    for (const auto& b : dataset.buildings) {
        footprints.push_back(b.footprint_m2);
    }

    std::vector<ScanRow> rows(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= jobs.size() || failed.load()) {
                return;
            }
            const Job& job = jobs[idx];
            try {
                // Step 1 is shared across methods and group counts so that a
                // grid point compares groupings of the same category model.
                const std::uint64_t category_seed = rng::mix(seed, std::uint64_t(job.k_reps));
                const CategoryModel categories =
                    build_categories(vectors, footprints, job.k_reps, category_seed);
                const std::uint64_t group_seed = rng::mix(
                    rng::mix(seed, std::uint64_t(job.method) * 31 + std::uint64_t(job.k_reps)),
                    std::uint64_t(job.k_groups));
                const Aggregation aggregation =
                    group_buildings(job.method, dataset, vectors, categories, job.k_groups,
                                    group_seed, min_cluster_size);
                rows[idx] = {job.method, job.k_reps, job.k_groups, int(aggregation.combos.size()),
                             network::group_cohesion(aggregation, dataset)};
            } catch (...) {
                if (!failed.exchange(true)) {
                    failure = std::current_exception();
                }
                return;
            }
        }
    };

    unsigned worker_count = threads > 0 ? threads : std::thread::hardware_concurrency();
    worker_count = std::max(1u, std::min<unsigned>(worker_count, jobs.size()));
    if (worker_count == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(worker_count);
        for (unsigned t = 0; t < worker_count; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failed.load()) {
        std::rethrow_exception(failure);
    }
    return rows;
}

} // namespace heatplan::clustering
