#ifndef HBP_BALANCE_HPP
#define HBP_BALANCE_HPP

#include <cstdint>
#include <vector>

#include "hbp/autoselect.hpp"
#include "hbp/metrics.hpp"
#include "hbp/packing.hpp"
#include "hbp/types.hpp"

namespace hbp {

enum class Phase { Warmup, Hybrid };

// One synchronous training step. All device batches belong to the same
// packing group, so the step runs a single (sp, ckpt) configuration.
struct Iteration {
    int group_index = 0;
    std::vector<DeviceBatch> devices;
    Phase phase = Phase::Hybrid;
};

// The full training schedule: groups, per-iteration device batches, ordering.
struct Plan {
    HierarchicalGroups groups;
    std::vector<Iteration> iterations;
    int device_count = 0;
    std::uint64_t seed = 0;

    const GroupConfig& group_of(const Iteration& it) const {
        return groups.groups.at(static_cast<std::size_t>(it.group_index));
    }

    CorpusFingerprint corpus() const;
    std::vector<Sample> all_samples() const;
};

// Partitions samples into half-open intervals (l_{i-1}, l_i], l_0 = 0.
// Exhaustive and disjoint; samples longer than l_max raise ValidationError
// (the ingest length-cap policy is expected to have run).
std::vector<SampleSet> group_data(const SampleSet& samples,
                                  const HierarchicalGroups& groups);

// Tops up each pack from the smaller-group pools, scanning pools from the
// nearest smaller group downward and within a pool by descending length.
// Consumed samples are removed from their pool. Never increases PR.
void greedy_fill(PackList& packs, std::vector<SampleSet>& smaller_pools);

// Sorts packs by attention complexity (descending, ties by pack order) and
// cuts consecutive runs of N into iterations. A final partial run is
// redistributed sample-wise into N attention-balanced device batches instead
// of leaving devices idle; if that cannot fit (it always does in practice)
// the original packs are kept and the spare devices stay empty.
std::vector<Iteration> balance_batching(const PackList& packs,
                                        int device_count, int group_index,
                                        bool sp_comm);

// Random pack-to-device batching: the naive baseline with the same chunking.
std::vector<Iteration> random_pack_batching(const PackList& packs,
                                            int device_count, int group_index,
                                            bool sp_comm, std::uint64_t seed);

struct PlanOptions {
    PackingStrategy strategy;
    int device_count = 4;
    std::uint64_t seed = 0;
    bool balance_batching = true; // false -> random pack batching
    bool greedy_fill = true;
};

// Full pipeline: group the data, pack each group from the largest down,
// greedy-fill from smaller pools, batch, concatenate and shuffle iteration
// order. Deterministic for fixed inputs and seed.
Plan build_plan(const SampleSet& samples, const HierarchicalGroups& groups,
                const PlanOptions& options);

// Padded-batching baseline plans (no packing): every batch becomes one
// device batch of single-sample packs padded to the batch maximum.
enum class BatchingMode { Random, Sorted };

Plan build_batching_plan(const SampleSet& samples, GroupConfig group,
                         int device_count, BatchingMode mode,
                         std::uint64_t seed);

} // namespace hbp

#endif // HBP_BALANCE_HPP
