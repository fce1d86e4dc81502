#include "hbp/autoselect.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hbp {

HierarchicalGroups HierarchicalGroups::single(GroupConfig g) {
    HierarchicalGroups h;
    h.groups.push_back(g);
    h.l_best = g.length;
    h.l_max = g.length;
    h.validate();
    return h;
}

void HierarchicalGroups::validate() const {
    if (groups.empty()) throw ValidationError("no packing groups");
    Tokens prev = 0;
    for (const auto& g : groups) {
        if (g.length <= prev) {
            throw ValidationError("group lengths must be strictly increasing");
        }
        if (g.config.sp < 1 || g.config.ckpt < 0) {
            throw ValidationError("invalid group runtime config");
        }
        prev = g.length;
    }
    if (groups.back().length != l_max) {
        throw ValidationError("last group must carry l_max");
    }
}

namespace {

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

// Nearest feasible power-of-two sp for the mid-level group, preferring the
// value closest to the exact ratio and smaller on ties.
int nearest_feasible_sp(double target, Tokens length, const Profiler& profiler,
                        std::span<const int> sp_candidates, int* ckpt_out) {
    int best_sp = -1;
    double best_gap = 0.0;
    int best_ckpt = 0;
    for (const int sp : sp_candidates) {
        if (!is_power_of_two(sp)) continue;
        int ckpt;
        try {
            ckpt = profiler.derive_ckpt(length, sp);
            if (profiler.profile_memory(length, RuntimeConfig{sp, ckpt}) < 0) {
                continue;
            }
        } catch (const Error&) {
            continue;
        }
        const double gap = std::abs(std::log2(static_cast<double>(sp)) -
                                    std::log2(target));
        if (best_sp < 0 || gap < best_gap ||
            (gap == best_gap && sp < best_sp)) {
            best_sp = sp;
            best_gap = gap;
            best_ckpt = ckpt;
        }
    }
    if (best_sp < 0) {
        throw InfeasibleError("no feasible sp for mid-level group of length " +
                              std::to_string(length));
    }
    *ckpt_out = best_ckpt;
    return best_sp;
}

} // namespace

HierarchicalGroups select_groups(std::span<const Tokens> candidate_lengths,
                                 const Profiler& profiler,
                                 std::span<const int> sp_candidates) {
    if (candidate_lengths.empty()) {
        throw ValidationError("select_groups: no candidate lengths");
    }
    std::vector<Tokens> lengths(candidate_lengths.begin(),
                                candidate_lengths.end());
    if (!std::is_sorted(lengths.begin(), lengths.end()) ||
        std::adjacent_find(lengths.begin(), lengths.end()) != lengths.end()) {
        throw ValidationError("candidate lengths must be strictly ascending");
    }
    for (const int sp : sp_candidates) {
        if (!is_power_of_two(sp)) {
            throw ValidationError("sp candidates must be powers of two, got " +
                                  std::to_string(sp));
        }
    }

    // Stage 1: best (sp, ckpt) per candidate length, then the fastest length.
    struct Profiled {
        Tokens length;
        SpCkptChoice choice;
    };
    std::vector<Profiled> profiled;
    std::string failures;
    for (const Tokens l : lengths) {
        try {
            profiled.push_back({l, find_best_sp_ckpt(profiler, l, sp_candidates)});
        } catch (const Error& e) {
            if (!failures.empty()) failures += "; ";
            failures += std::string(e.what());
        }
    }
    if (profiled.empty()) {
        throw InfeasibleError("no candidate length is feasible: " + failures);
    }
    if (profiled.back().length != lengths.back()) {
        throw InfeasibleError("largest candidate length " +
                              std::to_string(lengths.back()) +
                              " is infeasible: " + failures);
    }

    std::size_t best_idx = 0;
    for (std::size_t i = 1; i < profiled.size(); ++i) {
        if (profiled[i].choice.seconds < profiled[best_idx].choice.seconds) {
            best_idx = i;
        }
    }
    const Tokens l_best = profiled[best_idx].length;
    const RuntimeConfig s_best = profiled[best_idx].choice.config;
    const Tokens l_max = profiled.back().length;
    const RuntimeConfig s_max = profiled.back().choice.config;

    // Stage 2: zero-communication levels below l_best and l_max.
    const Tokens l1 = l_best / s_best.sp;
    const Tokens l2 = l_max / s_max.sp;

    std::vector<GroupConfig> raw;
    {
        // l1 runs without sequence parallelism by construction.
        RuntimeConfig c1{1, 0};
        c1.ckpt = profiler.derive_ckpt(l1, 1);
        raw.push_back(GroupConfig{l1, c1});
    }
    raw.push_back(GroupConfig{l_best, s_best});
    if (l2 > l_best) {
        RuntimeConfig c2{1, 0};
        const double ratio = static_cast<double>(l2) / static_cast<double>(l1);
        c2.sp = nearest_feasible_sp(ratio, l2, profiler, sp_candidates,
                                    &c2.ckpt);
        raw.push_back(GroupConfig{l2, c2});
    }
    raw.push_back(GroupConfig{l_max, s_max});

    // Deduplicate equal lengths, keeping the lower-sp configuration.
    std::map<Tokens, GroupConfig> dedup;
    for (const auto& g : raw) {
        auto it = dedup.find(g.length);
        if (it == dedup.end()) {
            dedup.emplace(g.length, g);
        } else if (g.config.sp < it->second.config.sp) {
            it->second = g;
        }
    }

    HierarchicalGroups out;
    for (const auto& [length, g] : dedup) out.groups.push_back(g);
    out.l_best = l_best;
    out.l_max = l_max;
    out.validate();
    return out;
}

} // namespace hbp
