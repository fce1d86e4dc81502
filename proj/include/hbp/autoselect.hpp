#ifndef HBP_AUTOSELECT_HPP
#define HBP_AUTOSELECT_HPP

#include <span>
#include <vector>

#include "hbp/costmodel.hpp"
#include "hbp/types.hpp"

namespace hbp {

// One packing-length level with its runtime strategy.
struct GroupConfig {
    Tokens length = 0;
    RuntimeConfig config;

    friend bool operator==(const GroupConfig&, const GroupConfig&) = default;
};

struct HierarchicalGroups {
    std::vector<GroupConfig> groups; // strictly increasing by length
    Tokens l_best = 0;
    Tokens l_max = 0;

    static HierarchicalGroups single(GroupConfig g);
    void validate() const;
};

// Two-stage group auto-selection.
// Stage 1 profiles every candidate length with its best (sp, ckpt) and keeps
// the fastest as l_best. Stage 2 adds the zero-communication levels
// l1 = floor(l_best / sp_best) and l2 = floor(l_max / sp_max); l2 is kept
// only when it exceeds l_best. Duplicate lengths collapse onto the lower-sp
// configuration. Candidate lengths infeasible under every sp are skipped;
// if nothing survives, the costmodel error propagates.
HierarchicalGroups select_groups(std::span<const Tokens> candidate_lengths,
                                 const Profiler& profiler,
                                 std::span<const int> sp_candidates);

} // namespace hbp

#endif // HBP_AUTOSELECT_HPP
