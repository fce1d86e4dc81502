#include "hbp/balance.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "hbp/rng.hpp"

namespace hbp {

CorpusFingerprint Plan::corpus() const { return fingerprint(all_samples()); }

std::vector<Sample> Plan::all_samples() const {
    std::vector<Sample> out;
    for (const auto& it : iterations) {
        for (const auto& d : it.devices) {
            for (const auto& p : d.packs) {
                out.insert(out.end(), p.samples.begin(), p.samples.end());
            }
        }
    }
    return out;
}

std::vector<SampleSet> group_data(const SampleSet& samples,
                                  const HierarchicalGroups& groups) {
    groups.validate();
    std::vector<SampleSet> parts(groups.groups.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        parts[i].source = samples.source + "#group" + std::to_string(i);
    }
    for (const auto& s : samples.samples) {
        if (s.length > groups.l_max) {
            throw ValidationError("sample " + std::to_string(s.id) +
                                  " exceeds the largest packing length " +
                                  std::to_string(groups.l_max));
        }
        // half-open intervals (l_{i-1}, l_i], l_0 = 0
        std::size_t idx = 0;
        while (s.length > groups.groups[idx].length) ++idx;
        parts[idx].samples.push_back(s);
    }
    return parts;
}

namespace {

// Pool index entry, ordered by descending length with ids ascending on ties.
struct PoolEntry {
    Tokens length;
    SampleId id;
    std::size_t position;

    bool operator<(const PoolEntry& other) const {
        if (length != other.length) return length > other.length;
        return id < other.id;
    }
};

} // namespace

void greedy_fill(PackList& packs, std::vector<SampleSet>& smaller_pools) {
    // One ordered index per pool, shared across packs. Repeatedly taking the
    // largest sample that still fits matches a single descending scan that
    // inserts every fitting sample.
    std::vector<std::multiset<PoolEntry>> ordered(smaller_pools.size());
    std::vector<std::vector<char>> consumed(smaller_pools.size());
    for (std::size_t j = 0; j < smaller_pools.size(); ++j) {
        const auto& pool = smaller_pools[j].samples;
        consumed[j].assign(pool.size(), 0);
        for (std::size_t k = 0; k < pool.size(); ++k) {
            ordered[j].insert(PoolEntry{pool[k].length, pool[k].id, k});
        }
    }

    for (auto& pack : packs.packs) {
        // nearest smaller group first
        for (std::size_t j = smaller_pools.size(); j-- > 0;) {
            auto& pool_index = ordered[j];
            Tokens residual = pack.residual();
            while (residual > 0 && !pool_index.empty()) {
                const auto it =
                    pool_index.lower_bound(PoolEntry{residual, -1, 0});
                if (it == pool_index.end()) break;
                pack.add(Sample{it->id, it->length});
                residual = pack.residual();
                consumed[j][it->position] = 1;
                pool_index.erase(it);
            }
        }
    }

    for (std::size_t j = 0; j < smaller_pools.size(); ++j) {
        auto& pool = smaller_pools[j].samples;
        std::vector<Sample> remaining;
        for (std::size_t k = 0; k < pool.size(); ++k) {
            if (!consumed[j][k]) remaining.push_back(pool[k]);
        }
        pool = std::move(remaining);
    }
}

namespace {

std::vector<Iteration> chunk_packs(std::vector<Pack> ordered, int device_count,
                                   int group_index, bool sp_comm,
                                   Tokens capacity) {
    std::vector<Iteration> iterations;
    const auto n = static_cast<std::size_t>(device_count);
    std::size_t i = 0;
    for (; i + n <= ordered.size(); i += n) {
        Iteration iter;
        iter.group_index = group_index;
        for (std::size_t d = 0; d < n; ++d) {
            iter.devices.push_back(DeviceBatch::build(
                static_cast<int>(d), {std::move(ordered[i + d])}, sp_comm));
        }
        iterations.push_back(std::move(iter));
    }
    if (i == ordered.size()) return iterations;

    // Final partial run: fewer packs than devices. Redistribute the samples
    // into N attention-balanced device batches instead of idling devices.
    std::vector<Sample> spill;
    for (std::size_t k = i; k < ordered.size(); ++k) {
        spill.insert(spill.end(), ordered[k].samples.begin(),
                     ordered[k].samples.end());
    }
    std::sort(spill.begin(), spill.end(), [](const Sample& a, const Sample& b) {
        if (a.length != b.length) return a.length > b.length;
        return a.id < b.id;
    });
    std::vector<Pack> batches;
    for (std::size_t d = 0; d < n; ++d) batches.push_back(Pack::make(capacity));
    bool ok = true;
    for (const auto& s : spill) {
        std::size_t target = n;
        std::int64_t best_attention = 0;
        for (std::size_t d = 0; d < n; ++d) {
            if (batches[d].residual() < s.length) continue;
            if (target == n || batches[d].attention < best_attention) {
                target = d;
                best_attention = batches[d].attention;
            }
        }
        if (target == n) {
            ok = false;
            break;
        }
        batches[target].add(s);
    }

    Iteration iter;
    iter.group_index = group_index;
    if (ok) {
        for (std::size_t d = 0; d < n; ++d) {
            // an unpadded variable-length batch: no padding is charged
            batches[d].capacity = batches[d].total;
            std::vector<Pack> packs;
            if (!batches[d].samples.empty()) packs.push_back(std::move(batches[d]));
            iter.devices.push_back(
                DeviceBatch::build(static_cast<int>(d), std::move(packs),
                                   sp_comm));
        }
    } else {
        for (std::size_t d = 0; d < n; ++d) {
            std::vector<Pack> packs;
            if (i + d < ordered.size()) packs.push_back(std::move(ordered[i + d]));
            iter.devices.push_back(
                DeviceBatch::build(static_cast<int>(d), std::move(packs),
                                   sp_comm));
        }
    }
    iterations.push_back(std::move(iter));
    return iterations;
}

} // namespace

std::vector<Iteration> balance_batching(const PackList& packs,
                                        int device_count, int group_index,
                                        bool sp_comm) {
    if (device_count < 1) throw ValidationError("device count must be >= 1");
    if (packs.packs.empty()) return {};
    std::vector<Pack> ordered = packs.packs;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const Pack& a, const Pack& b) {
                         return a.attention > b.attention;
                     });
    return chunk_packs(std::move(ordered), device_count, group_index, sp_comm,
                       packs.capacity);
}

std::vector<Iteration> random_pack_batching(const PackList& packs,
                                            int device_count, int group_index,
                                            bool sp_comm, std::uint64_t seed) {
    if (device_count < 1) throw ValidationError("device count must be >= 1");
    if (packs.packs.empty()) return {};
    std::vector<Pack> ordered = packs.packs;
    Rng rng(derive_seed(seed, "pack-batching", static_cast<std::uint64_t>(
                                                   group_index)));
    rng.shuffle(ordered);
    return chunk_packs(std::move(ordered), device_count, group_index, sp_comm,
                       packs.capacity);
}

Plan build_plan(const SampleSet& samples, const HierarchicalGroups& groups,
                const PlanOptions& options) {
    samples.validate();
    groups.validate();
    if (options.device_count < 1) {
        throw ValidationError("device count must be >= 1");
    }

    Plan plan;
    plan.groups = groups;
    plan.device_count = options.device_count;
    plan.seed = options.seed;

    auto pools = group_data(samples, groups);

    // Largest group first, so greedy fill may borrow from the smaller pools
    // before they are packed.
    for (std::size_t gi = groups.groups.size(); gi-- > 0;) {
        if (pools[gi].samples.empty()) continue;
        const auto& group = groups.groups[gi];
        SampleSet group_samples;
        group_samples.source = pools[gi].source;
        group_samples.samples = pools[gi].samples;
        pools[gi].samples.clear();

        PackList packed =
            pack(group_samples, group.length, options.strategy,
                 derive_seed(options.seed, "pack", static_cast<std::uint64_t>(gi)));
        if (options.greedy_fill && gi > 0) {
            std::vector<SampleSet> smaller(pools.begin(),
                                           pools.begin() +
                                               static_cast<std::ptrdiff_t>(gi));
            greedy_fill(packed, smaller);
            for (std::size_t j = 0; j < smaller.size(); ++j) {
                pools[j].samples = std::move(smaller[j].samples);
            }
        }
        const bool sp_comm = group.config.sp > 1;
        auto iterations =
            options.balance_batching
                ? balance_batching(packed, options.device_count,
                                   static_cast<int>(gi), sp_comm)
                : random_pack_batching(packed, options.device_count,
                                       static_cast<int>(gi), sp_comm,
                                       options.seed);
        for (auto& it : iterations) plan.iterations.push_back(std::move(it));
    }

    Rng rng(derive_seed(options.seed, "plan-shuffle"));
    rng.shuffle(plan.iterations);
    return plan;
}

Plan build_batching_plan(const SampleSet& samples, GroupConfig group,
                         int device_count, BatchingMode mode,
                         std::uint64_t seed) {
    samples.validate();
    if (device_count < 1) throw ValidationError("device count must be >= 1");

    auto batches = mode == BatchingMode::Sorted
                       ? sorted_batching(samples, group.length)
                       : random_batching(samples, group.length, seed);

    Plan plan;
    plan.groups = HierarchicalGroups::single(group);
    plan.device_count = device_count;
    plan.seed = seed;

    const bool sp_comm = group.config.sp > 1;
    const auto n = static_cast<std::size_t>(device_count);
    for (std::size_t i = 0; i < batches.size(); i += n) {
        Iteration iter;
        iter.group_index = 0;
        for (std::size_t d = 0; d < n; ++d) {
            std::vector<Pack> packs;
            if (i + d < batches.size()) {
                const auto& batch = batches[i + d];
                // one single-sample pack per row, each padded to the batch max
                for (const auto& s : batch.samples) {
                    Pack p = Pack::make(batch.max_length);
                    p.add(s);
                    packs.push_back(std::move(p));
                }
            }
            iter.devices.push_back(
                DeviceBatch::build(static_cast<int>(d), std::move(packs),
                                   sp_comm));
        }
        plan.iterations.push_back(std::move(iter));
    }
    return plan;
}

} // namespace hbp
