#include "hbp/packing.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "hbp/rng.hpp"

namespace hbp {

StrategyKind parse_strategy(const std::string& name) {
    if (name == "random") return StrategyKind::Random;
    if (name == "isf") return StrategyKind::Isf;
    if (name == "ffs") return StrategyKind::Ffs;
    if (name == "ffd") return StrategyKind::Ffd;
    if (name == "bfs") return StrategyKind::Bfs;
    if (name == "spfhp") return StrategyKind::Spfhp;
    throw ValidationError("unknown packing strategy: " + name);
}

std::string strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Random: return "random";
        case StrategyKind::Isf: return "isf";
        case StrategyKind::Ffs: return "ffs";
        case StrategyKind::Ffd: return "ffd";
        case StrategyKind::Bfs: return "bfs";
        case StrategyKind::Spfhp: return "spfhp";
    }
    return "?";
}

void PackingStrategy::validate() const {
    if (kind == StrategyKind::Isf) {
        if (isf_iterations < 1) {
            throw ValidationError("isf_iterations must be >= 1");
        }
        if (isf_fill_threshold <= 0.0 || isf_fill_threshold > 1.0) {
            throw ValidationError("isf fill threshold must lie in (0, 1]");
        }
    }
}

Tokens PackList::total_tokens() const {
    Tokens t = 0;
    for (const auto& p : packs) t += p.total;
    for (const auto& s : leftover) t += s.length;
    return t;
}

namespace {

// Sort by length descending, ids ascending on ties: the canonical order for
// FFD and for deterministic tie-breaking everywhere else.
void sort_decreasing(std::vector<Sample>& v) {
    std::sort(v.begin(), v.end(), [](const Sample& a, const Sample& b) {
        if (a.length != b.length) return a.length > b.length;
        return a.id < b.id;
    });
}

void sort_by_id(std::vector<Sample>& v) {
    std::sort(v.begin(), v.end(),
              [](const Sample& a, const Sample& b) { return a.id < b.id; });
}

// Walk samples in the given order, appending to the current pack while the
// next sample fits, else sealing it. O(N).
std::vector<Pack> sequential_fill(const std::vector<Sample>& order,
                                  Tokens capacity) {
    std::vector<Pack> packs;
    Pack current = Pack::make(capacity);
    for (const auto& s : order) {
        if (current.total + s.length > capacity) {
            if (!current.samples.empty()) packs.push_back(std::move(current));
            current = Pack::make(capacity);
        }
        current.add(s);
    }
    if (!current.samples.empty()) packs.push_back(std::move(current));
    return packs;
}

// First fit over the given order: each sample lands in the first open pack
// with room, else opens a new one.
std::vector<Pack> first_fit(const std::vector<Sample>& order, Tokens capacity) {
    std::vector<Pack> packs;
    for (const auto& s : order) {
        bool placed = false;
        for (auto& p : packs) {
            if (p.total + s.length <= capacity) {
                p.add(s);
                placed = true;
                break;
            }
        }
        if (!placed) {
            packs.push_back(Pack::make(capacity));
            packs.back().add(s);
        }
    }
    return packs;
}

// Best fit over the given order: tightest open pack that still has room,
// ties toward the earliest-created pack.
std::vector<Pack> best_fit(const std::vector<Sample>& order, Tokens capacity) {
    std::vector<Pack> packs;
    for (const auto& s : order) {
        std::size_t best = packs.size();
        Tokens best_residual = capacity + 1;
        for (std::size_t i = 0; i < packs.size(); ++i) {
            const Tokens residual = packs[i].residual();
            if (residual >= s.length && residual < best_residual) {
                best = i;
                best_residual = residual;
            }
        }
        if (best == packs.size()) {
            packs.push_back(Pack::make(capacity));
            packs.back().add(s);
        } else {
            packs[best].add(s);
        }
    }
    return packs;
}

// Shortest-pack-first over a 1-token-resolution length histogram: lengths are
// processed from longest to shortest (ids ascending inside a bucket) and each
// sample joins the emptiest open pack that fits, else opens a new pack.
std::vector<Pack> spfhp(std::vector<Sample> samples, Tokens capacity) {
    std::map<Tokens, std::vector<Sample>, std::greater<Tokens>> histogram;
    for (const auto& s : samples) histogram[s.length].push_back(s);
    for (auto& [len, bucket] : histogram) sort_by_id(bucket);

    std::vector<Pack> packs;
    // residual -> open pack indices; the emptiest pack has the largest
    // residual, the lowest index wins ties.
    std::map<Tokens, std::set<std::size_t>> by_residual;
    for (const auto& [len, bucket] : histogram) {
        for (const auto& s : bucket) {
            auto it = by_residual.lower_bound(len);
            if (it == by_residual.end()) {
                packs.push_back(Pack::make(capacity));
                const std::size_t idx = packs.size() - 1;
                packs[idx].add(s);
                by_residual[packs[idx].residual()].insert(idx);
            } else {
                // largest residual >= len
                it = std::prev(by_residual.end());
                const std::size_t idx = *it->second.begin();
                it->second.erase(it->second.begin());
                if (it->second.empty()) by_residual.erase(it);
                packs[idx].add(s);
                by_residual[packs[idx].residual()].insert(idx);
            }
        }
    }
    // drop empty residual buckets referencing full packs
    return packs;
}

struct IsfResult {
    std::vector<Pack> finalized;
    std::vector<Sample> pool;
};

// One ISF round: shuffle, sequential fill, freeze packs at or above the fill
// threshold, return the rest of the samples to the pool.
IsfResult isf_round(std::vector<Sample> pool, Tokens capacity,
                    double fill_threshold, std::uint64_t round_seed) {
    Rng rng(round_seed);
    rng.shuffle(pool);
    auto packs = sequential_fill(pool, capacity);
    IsfResult result;
    const auto min_fill =
        static_cast<double>(capacity) * fill_threshold;
    for (auto& p : packs) {
        if (static_cast<double>(p.total) >= min_fill) {
            result.finalized.push_back(std::move(p));
        } else {
            for (const auto& s : p.samples) result.pool.push_back(s);
        }
    }
    return result;
}

std::vector<Pack> isf(std::vector<Sample> samples, Tokens capacity,
                      const PackingStrategy& strategy, std::uint64_t seed) {
    std::vector<Pack> packs;
    std::vector<Sample> pool = std::move(samples);
    for (int round = 0; round < strategy.isf_iterations && !pool.empty();
         ++round) {
        auto result =
            isf_round(std::move(pool), capacity, strategy.isf_fill_threshold,
                      derive_seed(seed, "isf-round",
                                  static_cast<std::uint64_t>(round)));
        for (auto& p : result.finalized) packs.push_back(std::move(p));
        pool = std::move(result.pool);
    }
    // Final pass: first-fit-decreasing on whatever resisted filtering.
    sort_decreasing(pool);
    for (auto& p : first_fit(pool, capacity)) packs.push_back(std::move(p));
    return packs;
}

} // namespace

PackList pack(const SampleSet& samples, Tokens capacity,
              const PackingStrategy& strategy, std::uint64_t seed) {
    strategy.validate();
    if (capacity < 1) throw ValidationError("pack capacity must be >= 1");
    for (const auto& s : samples.samples) {
        if (s.length > capacity) {
            throw ValidationError("sample " + std::to_string(s.id) +
                                  " length " + std::to_string(s.length) +
                                  " exceeds pack capacity " +
                                  std::to_string(capacity));
        }
        if (s.length < 1) {
            throw ValidationError("sample " + std::to_string(s.id) +
                                  " has non-positive length");
        }
    }

    PackList list;
    list.capacity = capacity;
    std::vector<Sample> order = samples.samples;
    switch (strategy.kind) {
        case StrategyKind::Random: {
            Rng rng(derive_seed(seed, "random-pack"));
            rng.shuffle(order);
            list.packs = sequential_fill(order, capacity);
            break;
        }
        case StrategyKind::Isf:
            list.packs = isf(std::move(order), capacity, strategy, seed);
            break;
        case StrategyKind::Ffs: {
            Rng rng(derive_seed(seed, "ffs"));
            rng.shuffle(order);
            list.packs = first_fit(order, capacity);
            break;
        }
        case StrategyKind::Ffd:
            sort_decreasing(order);
            list.packs = first_fit(order, capacity);
            break;
        case StrategyKind::Bfs: {
            Rng rng(derive_seed(seed, "bfs"));
            rng.shuffle(order);
            list.packs = best_fit(order, capacity);
            break;
        }
        case StrategyKind::Spfhp:
            list.packs = spfhp(std::move(order), capacity);
            break;
    }
    return list;
}

namespace {

std::vector<PaddedBatch> budgeted_batches(const std::vector<Sample>& order,
                                          Tokens token_budget) {
    std::vector<PaddedBatch> batches;
    PaddedBatch current;
    for (const auto& s : order) {
        const Tokens next_max = std::max(current.max_length, s.length);
        const auto next_count =
            static_cast<Tokens>(current.samples.size()) + 1;
        if (!current.samples.empty() && next_count * next_max > token_budget) {
            current.padded_tokens =
                static_cast<Tokens>(current.samples.size()) *
                current.max_length;
            batches.push_back(std::move(current));
            current = PaddedBatch{};
        }
        current.samples.push_back(s);
        current.max_length = std::max(current.max_length, s.length);
    }
    if (!current.samples.empty()) {
        current.padded_tokens =
            static_cast<Tokens>(current.samples.size()) * current.max_length;
        batches.push_back(std::move(current));
    }
    return batches;
}

} // namespace

std::vector<PaddedBatch> sorted_batching(const SampleSet& samples,
                                         Tokens token_budget) {
    if (token_budget < samples.max_length()) {
        throw ValidationError("token budget " + std::to_string(token_budget) +
                              " is below the longest sample (" +
                              std::to_string(samples.max_length()) + ")");
    }
    std::vector<Sample> order = samples.samples;
    sort_decreasing(order);
    return budgeted_batches(order, token_budget);
}

std::vector<PaddedBatch> random_batching(const SampleSet& samples,
                                         Tokens token_budget,
                                         std::uint64_t seed) {
    if (token_budget < samples.max_length()) {
        throw ValidationError("token budget " + std::to_string(token_budget) +
                              " is below the longest sample (" +
                              std::to_string(samples.max_length()) + ")");
    }
    std::vector<Sample> order = samples.samples;
    Rng rng(derive_seed(seed, "random-batching"));
    rng.shuffle(order);
    return budgeted_batches(order, token_budget);
}

} // namespace hbp
