#ifndef HBP_COSTMODEL_HPP
#define HBP_COSTMODEL_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hbp/metrics.hpp"
#include "hbp/types.hpp"

namespace hbp {

// Runtime strategy for one packing group: sequence-parallel degree and the
// number of gradient-checkpointed layers.
struct RuntimeConfig {
    int sp = 1;
    int ckpt = 0;

    friend bool operator==(const RuntimeConfig&, const RuntimeConfig&) = default;
};

// Analytic stand-in for GPU profiling. Compute cost per device batch is
//   linear * T + attention * sum(t_i^2) / sp
// plus sequence-parallel communication and gradient-checkpoint recompute.
// Memory is a linear activation model against a hard device budget.
struct HardwareProfile {
    double per_token_linear_cost = 2.5e-4;      // s/token
    double per_token2_attention_cost = 1.5e-9;  // s/token^2
    double sp_comm_cost = 1.6e-5;               // s/token per SP hop
    double gc_recompute_factor = 1.0 / 3.0;     // fwd recompute share at full GC
    double fixed_iteration_cost = 0.0;          // s per device per iteration
    int layer_count = 32;
    std::int64_t base_memory = 24LL << 30;               // bytes
    double per_token_activation_memory = 300000.0;       // bytes/token/layer
    // a checkpointed layer keeps 25% of its activations
    double gc_memory_saving_per_layer = 300000.0 * 0.75 * 4096.0;
    Tokens reference_length = 4096;   // tokens at which the GC saving is quoted
    std::int64_t device_memory = 80LL << 30;             // bytes

    void validate() const;
    static HardwareProfile defaults() { return HardwareProfile{}; }
};

// Device memory used when training packs of length `l` under `config`.
std::int64_t memory_used(Tokens l, RuntimeConfig config,
                         const HardwareProfile& profile);

// Aggregated workload of one device's packs. Padded tokens charge the pack
// capacity (fixed-shape training pads packs to their packing length); the
// residual gap is charged as one extra attention segment.
struct DeviceWork {
    Tokens padded_tokens = 0;
    Tokens real_tokens = 0;
    std::int64_t attention = 0;
    Tokens max_capacity = 0;
};

DeviceWork device_work(std::span<const Pack> packs);

// Simulated wall time of one device's iteration. Throws InfeasibleError with
// required vs available bytes when the memory model does not fit.
double iter_time(std::span<const Pack> device_packs, RuntimeConfig config,
                 const HardwareProfile& profile);
double iter_time(const DeviceWork& work, RuntimeConfig config,
                 const HardwareProfile& profile);

// ---------------------------------------------------------------------------
// Profiler interface
// ---------------------------------------------------------------------------

// Behavioural interface the auto-selection algorithms run against. The
// analytic implementation evaluates the cost model; the table-driven one
// replays measured values.
class Profiler {
public:
    virtual ~Profiler() = default;

    // Iteration time for a full pack of length l. Throws InfeasibleError when
    // the configuration cannot run (OOM or missing measurement).
    virtual double profile_time(Tokens l, RuntimeConfig config) const = 0;

    // Remaining device memory (bytes, negative when over budget).
    virtual std::int64_t profile_memory(Tokens l, RuntimeConfig config) const = 0;

    // Checkpoint layer count to pair with (l, sp). Analytic profiles derive it
    // with the two-probe greedy estimate; table profiles return the recorded
    // measurement.
    virtual int derive_ckpt(Tokens l, int sp) const = 0;
};

class AnalyticProfiler final : public Profiler {
public:
    explicit AnalyticProfiler(HardwareProfile profile, int ckpt_min = 0,
                              int ckpt_max = -1);

    double profile_time(Tokens l, RuntimeConfig config) const override;
    std::int64_t profile_memory(Tokens l, RuntimeConfig config) const override;
    int derive_ckpt(Tokens l, int sp) const override;

    const HardwareProfile& profile() const { return profile_; }

private:
    HardwareProfile profile_;
    int ckpt_min_;
    int ckpt_max_;
};

// One measured row: (length, sp, ckpt, memory_bytes, iter_seconds).
struct ProfileRow {
    Tokens length = 0;
    int sp = 1;
    int ckpt = 0;
    std::int64_t memory_bytes = 0; // used bytes; ignored when oom
    double seconds = 0.0;
    bool oom = false;
};

class TableProfiler final : public Profiler {
public:
    explicit TableProfiler(std::vector<ProfileRow> rows,
                           std::int64_t device_memory = 80LL << 30);

    // CSV columns: length,sp,ckpt,memory_bytes,iter_seconds. memory_bytes may
    // be the literal `oom`, marking the configuration infeasible.
    static TableProfiler from_csv(std::istream& in, const std::string& name,
                                  std::int64_t device_memory = 80LL << 30);
    static TableProfiler from_csv_file(const std::filesystem::path& path,
                                       std::int64_t device_memory = 80LL << 30);

    double profile_time(Tokens l, RuntimeConfig config) const override;
    std::int64_t profile_memory(Tokens l, RuntimeConfig config) const override;
    int derive_ckpt(Tokens l, int sp) const override;

    const std::vector<ProfileRow>& rows() const { return rows_; }

private:
    const ProfileRow* find(Tokens l, int sp) const;

    std::vector<ProfileRow> rows_;
    std::map<std::pair<Tokens, int>, std::size_t> by_length_sp_;
    std::int64_t device_memory_;
};

// ---------------------------------------------------------------------------
// Strategy search
// ---------------------------------------------------------------------------

// Two-probe greedy checkpoint estimate: probe remaining memory at ckpt_min
// and ckpt_max, take the per-layer slope, and return the smallest layer count
// whose projected remaining memory is non-negative (rounded up, clamped to
// the valid range [0, ckpt_max]). Throws InfeasibleError when checkpointing
// does not reduce memory under the profile.
int greedy_profile_ckpt(const Profiler& profiler, Tokens l, int sp,
                        int ckpt_min, int ckpt_max);

struct SpCkptChoice {
    RuntimeConfig config;
    double seconds = 0.0;
};

// Derives a checkpoint setting per sp candidate, profiles each, and returns
// the fastest feasible configuration (ties toward smaller sp). Throws
// InfeasibleError listing every failure when no candidate fits.
SpCkptChoice find_best_sp_ckpt(const Profiler& profiler, Tokens l,
                               std::span<const int> sp_candidates);

// Total profiling cost: (len(L)*len(SP) + memory_probe_count) * profile_iter
// iterations, expressed in seconds of `iteration_time`.
double profiling_overhead(std::size_t length_count, std::size_t sp_count,
                          std::size_t memory_probe_count, int profile_iter,
                          double iteration_time);

// Loads HardwareProfile constants from a JSON object of named fields.
HardwareProfile load_analytic_profile(std::istream& in,
                                      const std::string& name);
HardwareProfile load_analytic_profile_file(const std::filesystem::path& path);

} // namespace hbp

#endif // HBP_COSTMODEL_HPP
