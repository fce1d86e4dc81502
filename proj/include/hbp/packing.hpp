#ifndef HBP_PACKING_HPP
#define HBP_PACKING_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hbp/metrics.hpp"
#include "hbp/types.hpp"

namespace hbp {

// Baseline packing heuristics, all behind one strategy interface.
// Complexities (N samples, M samples/pack, S capacity, C rounds):
//   random O(N); ISF C*O(N+M); FFS/FFD/BFS O(NM); SPFHP O(N + S^2) via a
//   1-token-resolution length histogram.
enum class StrategyKind { Random, Isf, Ffs, Ffd, Bfs, Spfhp };

StrategyKind parse_strategy(const std::string& name);
std::string strategy_name(StrategyKind kind);

struct PackingStrategy {
    StrategyKind kind = StrategyKind::Isf;
    // ISF only: number of shuffle/fill/filter rounds and the fill ratio at
    // which a pack is frozen.
    int isf_iterations = 8;
    double isf_fill_threshold = 0.98;

    void validate() const;
};

struct PackList {
    std::vector<Pack> packs;
    Tokens capacity = 0;
    // Samples not packed. Empty for all built-in strategies; kept so partial
    // strategies can share the type.
    std::vector<Sample> leftover;

    Tokens total_tokens() const;
};

// Packs `samples` to `capacity`. Deterministic for a fixed seed; every sample
// lands in exactly one pack; no pack exceeds capacity. A sample longer than
// the capacity raises ValidationError naming its id. Ties are broken toward
// the lowest sample id.
PackList pack(const SampleSet& samples, Tokens capacity,
              const PackingStrategy& strategy, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Padded batching baselines (no packing)
// ---------------------------------------------------------------------------

// A mini-batch of whole samples padded to the batch maximum.
struct PaddedBatch {
    std::vector<Sample> samples;
    Tokens max_length = 0;
    Tokens padded_tokens = 0; // samples.size() * max_length
};

// Sorts by length (descending) and greedily groups consecutive samples while
// the padded size stays within the per-device token budget; the local batch
// size therefore varies per batch.
std::vector<PaddedBatch> sorted_batching(const SampleSet& samples,
                                         Tokens token_budget);

// Same grouping rule over a seeded shuffle; models naive randomized batching.
std::vector<PaddedBatch> random_batching(const SampleSet& samples,
                                         Tokens token_budget,
                                         std::uint64_t seed);

} // namespace hbp

#endif // HBP_PACKING_HPP
