#include "hbp/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hbp {

void HardwareProfile::validate() const {
    if (per_token_linear_cost < 0 || per_token2_attention_cost < 0 ||
        sp_comm_cost < 0 || gc_recompute_factor < 0 ||
        fixed_iteration_cost < 0) {
        throw ValidationError("profile costs must be >= 0");
    }
    if (layer_count < 1) throw ValidationError("layer_count must be >= 1");
    if (device_memory <= base_memory) {
        throw ValidationError("device_memory must exceed base_memory");
    }
    if (per_token_activation_memory < 0 || gc_memory_saving_per_layer < 0) {
        throw ValidationError("memory constants must be >= 0");
    }
    if (reference_length < 1) {
        throw ValidationError("reference_length must be >= 1");
    }
    // A checkpointed layer cannot save more than a layer uses; otherwise the
    // model would stop being monotone in 1/sp.
    if (gc_memory_saving_per_layer >
        per_token_activation_memory * static_cast<double>(reference_length)) {
        throw ValidationError(
            "gc_memory_saving_per_layer exceeds per-layer activation memory");
    }
}

std::int64_t memory_used(Tokens l, RuntimeConfig config,
                         const HardwareProfile& profile) {
    if (config.sp < 1) throw ValidationError("sp must be >= 1");
    if (config.ckpt < 0 || config.ckpt > profile.layer_count) {
        throw ValidationError("ckpt must lie in [0, layer_count]");
    }
    const double shard =
        static_cast<double>(l) / static_cast<double>(config.sp);
    const double activations =
        profile.per_token_activation_memory * shard *
        static_cast<double>(profile.layer_count);
    const double saved = profile.gc_memory_saving_per_layer *
                         static_cast<double>(config.ckpt) * shard /
                         static_cast<double>(profile.reference_length);
    return profile.base_memory +
           static_cast<std::int64_t>(std::ceil(activations - saved));
}

DeviceWork device_work(std::span<const Pack> packs) {
    DeviceWork w;
    for (const auto& p : packs) {
        w.padded_tokens += p.capacity;
        w.real_tokens += p.total;
        w.attention += p.attention;
        const Tokens pad = p.capacity - p.total;
        // the padded tail behaves like one extra attention segment
        w.attention += pad * pad;
        w.max_capacity = std::max(w.max_capacity, p.capacity);
    }
    return w;
}

double iter_time(const DeviceWork& work, RuntimeConfig config,
                 const HardwareProfile& profile) {
    profile.validate();
    if (work.padded_tokens == 0) return 0.0;

    const std::int64_t used = memory_used(work.max_capacity, config, profile);
    if (used > profile.device_memory) {
        throw InfeasibleError(
            "configuration sp=" + std::to_string(config.sp) +
            " ckpt=" + std::to_string(config.ckpt) + " at length " +
            std::to_string(work.max_capacity) + " requires " +
            std::to_string(used) + " bytes, " +
            std::to_string(profile.device_memory) + " available");
    }

    const double tokens = static_cast<double>(work.padded_tokens);
    const double compute =
        profile.per_token_linear_cost * tokens +
        profile.per_token2_attention_cost *
            static_cast<double>(work.attention) /
            static_cast<double>(config.sp);
    const double recompute = profile.gc_recompute_factor *
                             static_cast<double>(config.ckpt) /
                             static_cast<double>(profile.layer_count) * compute;
    // all-to-all volume grows with the SP degree: one hop per extra shard
    const double comm =
        config.sp > 1
            ? profile.sp_comm_cost * tokens * static_cast<double>(config.sp - 1)
            : 0.0;
    return compute + recompute + comm + profile.fixed_iteration_cost;
}

double iter_time(std::span<const Pack> device_packs, RuntimeConfig config,
                 const HardwareProfile& profile) {
    return iter_time(device_work(device_packs), config, profile);
}

// ---------------------------------------------------------------------------
// AnalyticProfiler
// ---------------------------------------------------------------------------

AnalyticProfiler::AnalyticProfiler(HardwareProfile profile, int ckpt_min,
                                   int ckpt_max)
    : profile_(profile),
      ckpt_min_(ckpt_min),
      ckpt_max_(ckpt_max < 0 ? profile.layer_count : ckpt_max) {
    profile_.validate();
    if (ckpt_min_ < 0 || ckpt_min_ >= ckpt_max_ ||
        ckpt_max_ > profile_.layer_count) {
        throw ValidationError("ckpt probe bounds must satisfy "
                              "0 <= ckpt_min < ckpt_max <= layer_count");
    }
}

double AnalyticProfiler::profile_time(Tokens l, RuntimeConfig config) const {
    // Profiling runs naive packing: one full-length sequence per device.
    Pack p = Pack::make(l);
    p.add(Sample{0, l});
    const Pack packs[] = {p};
    return iter_time(std::span<const Pack>(packs), config, profile_);
}

std::int64_t AnalyticProfiler::profile_memory(Tokens l,
                                              RuntimeConfig config) const {
    return profile_.device_memory - memory_used(l, config, profile_);
}

int AnalyticProfiler::derive_ckpt(Tokens l, int sp) const {
    return greedy_profile_ckpt(*this, l, sp, ckpt_min_, ckpt_max_);
}

// ---------------------------------------------------------------------------
// TableProfiler
// ---------------------------------------------------------------------------

TableProfiler::TableProfiler(std::vector<ProfileRow> rows,
                             std::int64_t device_memory)
    : rows_(std::move(rows)), device_memory_(device_memory) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto key = std::make_pair(rows_[i].length, rows_[i].sp);
        if (!by_length_sp_.emplace(key, i).second) {
            throw ValidationError(
                "duplicate profile row for length " +
                std::to_string(rows_[i].length) + ", sp " +
                std::to_string(rows_[i].sp));
        }
    }
}

TableProfiler TableProfiler::from_csv(std::istream& in,
                                      const std::string& name,
                                      std::int64_t device_memory) {
    std::vector<ProfileRow> rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            cells.push_back(b == std::string::npos
                                ? ""
                                : cell.substr(b, e - b + 1));
        }
        if (!header_seen && !cells.empty() && cells[0] == "length") {
            header_seen = true;
            continue;
        }
        if (cells.size() < 5) {
            throw ValidationError(name + " line " + std::to_string(line_no) +
                                  ": want length,sp,ckpt,memory_bytes,"
                                  "iter_seconds");
        }
        ProfileRow row;
        try {
            row.length = std::stoll(cells[0]);
            row.sp = std::stoi(cells[1]);
            row.ckpt = std::stoi(cells[2]);
            if (cells[3] == "oom") {
                row.oom = true;
            } else {
                row.memory_bytes = std::stoll(cells[3]);
                row.seconds = std::stod(cells[4]);
            }
        } catch (const std::exception&) {
            throw ValidationError(name + " line " + std::to_string(line_no) +
                                  ": malformed profile row");
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw ValidationError("profile table is empty: " + name);
    }
    return TableProfiler(std::move(rows), device_memory);
}

TableProfiler TableProfiler::from_csv_file(const std::filesystem::path& path,
                                           std::int64_t device_memory) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile table: " + path.string());
    return from_csv(in, path.string(), device_memory);
}

const ProfileRow* TableProfiler::find(Tokens l, int sp) const {
    const auto it = by_length_sp_.find(std::make_pair(l, sp));
    return it == by_length_sp_.end() ? nullptr : &rows_[it->second];
}

double TableProfiler::profile_time(Tokens l, RuntimeConfig config) const {
    const ProfileRow* row = find(l, config.sp);
    if (row == nullptr) {
        throw InfeasibleError("no profile row for length " + std::to_string(l) +
                              ", sp " + std::to_string(config.sp));
    }
    if (row->oom) {
        throw InfeasibleError("profiled configuration is out of memory at "
                              "length " + std::to_string(l) + ", sp " +
                              std::to_string(config.sp));
    }
    if (row->ckpt != config.ckpt) {
        throw InfeasibleError("no profile row for length " + std::to_string(l) +
                              ", sp " + std::to_string(config.sp) + ", ckpt " +
                              std::to_string(config.ckpt));
    }
    return row->seconds;
}

std::int64_t TableProfiler::profile_memory(Tokens l,
                                           RuntimeConfig config) const {
    const ProfileRow* row = find(l, config.sp);
    if (row == nullptr) {
        throw InfeasibleError("no profile row for length " + std::to_string(l) +
                              ", sp " + std::to_string(config.sp));
    }
    if (row->oom) return -1;
    return device_memory_ - row->memory_bytes;
}

int TableProfiler::derive_ckpt(Tokens l, int sp) const {
    const ProfileRow* row = find(l, sp);
    if (row == nullptr) {
        throw InfeasibleError("no profile row for length " + std::to_string(l) +
                              ", sp " + std::to_string(sp));
    }
    if (row->oom) {
        throw InfeasibleError("profiled configuration is out of memory at "
                              "length " + std::to_string(l) + ", sp " +
                              std::to_string(sp));
    }
    return row->ckpt;
}

// ---------------------------------------------------------------------------
// Strategy search
// ---------------------------------------------------------------------------

int greedy_profile_ckpt(const Profiler& profiler, Tokens l, int sp,
                        int ckpt_min, int ckpt_max) {
    if (ckpt_min >= ckpt_max) {
        throw ValidationError("greedy_profile_ckpt: ckpt_min must be < ckpt_max");
    }
    const double m1r = static_cast<double>(
        profiler.profile_memory(l, RuntimeConfig{sp, ckpt_min}));
    const double m2r = static_cast<double>(
        profiler.profile_memory(l, RuntimeConfig{sp, ckpt_max}));
    const double m_ave = (m2r - m1r) / static_cast<double>(ckpt_max - ckpt_min);
    if (m_ave <= 0.0) {
        throw InfeasibleError(
            "GC does not reduce memory under this profile (slope " +
            std::to_string(m_ave) + " bytes/layer)");
    }
    const double c_o = static_cast<double>(ckpt_max) - m2r / m_ave;
    // Rounded up (the memory-safe direction) and clamped to the valid layer
    // range; the probes only anchor the slope, so the estimate may fall
    // below ckpt_min.
    const auto rounded = static_cast<int>(std::ceil(c_o));
    return std::clamp(rounded, 0, ckpt_max);
}

SpCkptChoice find_best_sp_ckpt(const Profiler& profiler, Tokens l,
                               std::span<const int> sp_candidates) {
    if (sp_candidates.empty()) {
        throw ValidationError("find_best_sp_ckpt: no sp candidates");
    }
    std::optional<SpCkptChoice> best;
    std::string failures;
    for (const int sp : sp_candidates) {
        try {
            RuntimeConfig config;
            config.sp = sp;
            config.ckpt = profiler.derive_ckpt(l, sp);
            if (profiler.profile_memory(l, config) < 0) {
                throw InfeasibleError("sp=" + std::to_string(sp) +
                                      " does not fit device memory even at ckpt " +
                                      std::to_string(config.ckpt));
            }
            const double seconds = profiler.profile_time(l, config);
            if (!best || seconds < best->seconds) {
                best = SpCkptChoice{config, seconds};
            }
        } catch (const Error& e) {
            if (!failures.empty()) failures += "; ";
            failures += "sp=" + std::to_string(sp) + ": " + e.what();
        }
    }
    if (!best) {
        throw InfeasibleError("no feasible (sp, ckpt) for length " +
                              std::to_string(l) + ": " + failures);
    }
    return *best;
}

double profiling_overhead(std::size_t length_count, std::size_t sp_count,
                          std::size_t memory_probe_count, int profile_iter,
                          double iteration_time) {
    if (length_count < 1 || sp_count < 1 || memory_probe_count < 1 ||
        profile_iter < 1) {
        throw ValidationError("profiling_overhead: all counts must be >= 1");
    }
    const double time_probes = static_cast<double>(length_count) *
                               static_cast<double>(sp_count) *
                               static_cast<double>(profile_iter);
    const double memory_probes = static_cast<double>(memory_probe_count) *
                                 static_cast<double>(profile_iter);
    return (time_probes + memory_probes) * iteration_time;
}

HardwareProfile load_analytic_profile(std::istream& in,
                                      const std::string& name) {
    nlohmann::json obj;
    try {
        in >> obj;
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("bad analytic profile " + name + ": " + e.what());
    }
    HardwareProfile p = HardwareProfile::defaults();
    auto get_double = [&](const char* key, double& out) {
        if (obj.contains(key)) out = obj[key].get<double>();
    };
    auto get_i64 = [&](const char* key, std::int64_t& out) {
        if (obj.contains(key)) out = obj[key].get<std::int64_t>();
    };
    get_double("per_token_linear_cost", p.per_token_linear_cost);
    get_double("per_token2_attention_cost", p.per_token2_attention_cost);
    get_double("sp_comm_cost", p.sp_comm_cost);
    get_double("gc_recompute_factor", p.gc_recompute_factor);
    get_double("fixed_iteration_cost", p.fixed_iteration_cost);
    if (obj.contains("layer_count")) p.layer_count = obj["layer_count"].get<int>();
    get_i64("base_memory", p.base_memory);
    get_double("per_token_activation_memory", p.per_token_activation_memory);
    get_double("gc_memory_saving_per_layer", p.gc_memory_saving_per_layer);
    get_i64("device_memory", p.device_memory);
    if (obj.contains("reference_length")) {
        p.reference_length = obj["reference_length"].get<Tokens>();
    }
    p.validate();
    return p;
}

HardwareProfile load_analytic_profile_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open analytic profile: " + path.string());
    return load_analytic_profile(in, path.string());
}

} // namespace hbp
