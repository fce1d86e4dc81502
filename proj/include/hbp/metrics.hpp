#ifndef HBP_METRICS_HPP
#define HBP_METRICS_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "hbp/types.hpp"

namespace hbp {

struct Plan; // defined in balance.hpp

// An ordered multiset of samples packed to a capacity. `attention` caches
// the sum of squared lengths, the dominant term of packed-attention cost.
struct Pack {
    std::vector<Sample> samples;
    Tokens capacity = 0;
    Tokens total = 0;
    std::int64_t attention = 0;

    void add(const Sample& s) {
        samples.push_back(s);
        total += s.length;
        attention += s.length * s.length;
    }

    Tokens residual() const { return capacity - total; }

    static Pack make(Tokens capacity) {
        Pack p;
        p.capacity = capacity;
        return p;
    }
};

// The work one data-parallel rank carries in one iteration.
struct DeviceBatch {
    int device_index = 0;
    std::vector<Pack> packs;
    Tokens tokens = 0;       // sum of pack totals
    Tokens comm_tokens = 0;  // == tokens when the group's sp degree > 1
    std::int64_t attention = 0;

    static DeviceBatch build(int device_index, std::vector<Pack> packs,
                             bool sp_comm);
};

// ---------------------------------------------------------------------------
// Balance / efficiency ratios. All return values in [0, 1].
// ---------------------------------------------------------------------------

// Dist Balance Ratio: sum_i (T_max - T_i) / (T_max * N).
// Throws ValidationError when every device carries zero tokens.
double dbr(std::span<const DeviceBatch> iteration);

// Padding Ratio over a batch of lengths padded to t_max:
// sum_i (t_max - t_i) / (t_max * B). Throws when any t_i > t_max.
double pr(std::span<const Tokens> lengths, Tokens t_max);

// Padding Ratio over packs: each pack pads its total to its own capacity.
// Equals the single-capacity formula when all capacities agree.
double pack_pr(std::span<const Pack> packs);

// Attention Balance Ratio: sum_i (A_max - A_i) / (A_max * N).
double abr(std::span<const DeviceBatch> iteration);

// Communication Ratio over a whole run: total comm tokens / total tokens.
double cr(std::span<const std::vector<DeviceBatch>> iterations);

// Average tokens processed per device per iteration.
double ave_t(std::span<const std::vector<DeviceBatch>> iterations);

struct IterationTrace {
    double dbr = 0.0;
    double abr = 0.0;
};

struct MetricsReport {
    double dbr = 0.0;   // mean of per-iteration DBR
    double pr = 0.0;
    double abr = 0.0;   // mean of per-iteration ABR
    double cr = 0.0;
    double ave_t = 0.0; // tokens per device per iteration
    std::vector<IterationTrace> per_iteration;
};

// Aggregates all five metrics over a plan. Per-iteration DBR/ABR are averaged
// arithmetically for the headline numbers; traces are retained.
MetricsReport report(const Plan& plan);

} // namespace hbp

#endif // HBP_METRICS_HPP
