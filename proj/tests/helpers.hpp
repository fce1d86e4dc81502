#ifndef HBP_TEST_HELPERS_HPP
#define HBP_TEST_HELPERS_HPP

#include <algorithm>
#include <map>
#include <vector>

#include "hbp/balance.hpp"
#include "hbp/metrics.hpp"
#include "hbp/rng.hpp"
#include "hbp/types.hpp"

namespace hbp::test {

inline SampleSet make_set(const std::vector<Tokens>& lengths) {
    SampleSet set;
    set.source = "test";
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        set.samples.push_back(Sample{static_cast<SampleId>(i), lengths[i]});
    }
    return set;
}

inline Pack make_pack(const std::vector<Tokens>& lengths, Tokens capacity) {
    Pack p = Pack::make(capacity);
    SampleId id = 0;
    for (const Tokens t : lengths) p.add(Sample{id++, t});
    return p;
}

// One device batch per length list; each list becomes a single pack.
inline std::vector<DeviceBatch> make_iteration(
    const std::vector<std::vector<Tokens>>& device_lengths, Tokens capacity,
    bool sp_comm = false) {
    std::vector<DeviceBatch> devices;
    for (std::size_t i = 0; i < device_lengths.size(); ++i) {
        std::vector<Pack> packs;
        packs.push_back(make_pack(device_lengths[i], capacity));
        devices.push_back(
            DeviceBatch::build(static_cast<int>(i), std::move(packs), sp_comm));
    }
    return devices;
}

// Multiset of (id, length) pairs, for conservation checks.
inline std::map<std::pair<SampleId, Tokens>, int> sample_multiset(
    const std::vector<Sample>& samples) {
    std::map<std::pair<SampleId, Tokens>, int> out;
    for (const auto& s : samples) ++out[{s.id, s.length}];
    return out;
}

// Hybrid corpus: mostly short lognormal lengths with a long uniform tail.
inline SampleSet hybrid_corpus(std::size_t count, double long_fraction,
                               Tokens short_cap, Tokens max_length,
                               std::uint64_t seed) {
    Rng rng(seed);
    SampleSet set;
    set.source = "hybrid-test";
    const auto long_count =
        static_cast<std::size_t>(static_cast<double>(count) * long_fraction);
    for (std::size_t i = 0; i < count; ++i) {
        Tokens len;
        if (i < count - long_count) {
            const double v = std::exp(7.0 + 0.8 * rng.normal());
            len = std::clamp<Tokens>(static_cast<Tokens>(v), 1, short_cap);
        } else {
            len = rng.uniform_int(short_cap + 1, max_length);
        }
        set.samples.push_back(Sample{static_cast<SampleId>(i), len});
    }
    return set;
}

inline HierarchicalGroups two_level_groups(Tokens short_len = 16384,
                                           Tokens long_len = 131072,
                                           int long_sp = 8) {
    HierarchicalGroups g;
    g.groups.push_back(GroupConfig{short_len, RuntimeConfig{1, 28}});
    g.groups.push_back(GroupConfig{long_len, RuntimeConfig{long_sp, 29}});
    g.l_best = short_len;
    g.l_max = long_len;
    return g;
}

} // namespace hbp::test

#endif // HBP_TEST_HELPERS_HPP
