#include "hbp/metrics.hpp"

#include <algorithm>

#include "hbp/balance.hpp"

namespace hbp {

DeviceBatch DeviceBatch::build(int device_index, std::vector<Pack> packs,
                               bool sp_comm) {
    DeviceBatch b;
    b.device_index = device_index;
    b.packs = std::move(packs);
    for (const auto& p : b.packs) {
        b.tokens += p.total;
        b.attention += p.attention;
    }
    b.comm_tokens = sp_comm ? b.tokens : 0;
    return b;
}

double dbr(std::span<const DeviceBatch> iteration) {
    if (iteration.empty()) throw ValidationError("dbr: no devices");
    Tokens t_max = 0;
    for (const auto& d : iteration) t_max = std::max(t_max, d.tokens);
    if (t_max == 0) {
        throw ValidationError("dbr undefined: all devices carry zero tokens");
    }
    double gap = 0.0;
    for (const auto& d : iteration) {
        gap += static_cast<double>(t_max - d.tokens);
    }
    return gap / (static_cast<double>(t_max) *
                  static_cast<double>(iteration.size()));
}

double pr(std::span<const Tokens> lengths, Tokens t_max) {
    if (lengths.empty()) throw ValidationError("pr: empty batch");
    if (t_max <= 0) throw ValidationError("pr: t_max must be positive");
    double gap = 0.0;
    for (const Tokens t : lengths) {
        if (t > t_max) {
            throw ValidationError("pr: length " + std::to_string(t) +
                                  " exceeds t_max " + std::to_string(t_max));
        }
        gap += static_cast<double>(t_max - t);
    }
    return gap / (static_cast<double>(t_max) *
                  static_cast<double>(lengths.size()));
}

double pack_pr(std::span<const Pack> packs) {
    double gap = 0.0;
    double cap = 0.0;
    for (const auto& p : packs) {
        if (p.total > p.capacity) {
            throw ValidationError("pr: pack total exceeds capacity");
        }
        gap += static_cast<double>(p.capacity - p.total);
        cap += static_cast<double>(p.capacity);
    }
    if (cap == 0.0) throw ValidationError("pr: zero total capacity");
    return gap / cap;
}

double abr(std::span<const DeviceBatch> iteration) {
    if (iteration.empty()) throw ValidationError("abr: no devices");
    std::int64_t a_max = 0;
    for (const auto& d : iteration) a_max = std::max(a_max, d.attention);
    if (a_max == 0) {
        throw ValidationError("abr undefined: all devices carry zero attention");
    }
    double gap = 0.0;
    for (const auto& d : iteration) {
        gap += static_cast<double>(a_max - d.attention);
    }
    return gap / (static_cast<double>(a_max) *
                  static_cast<double>(iteration.size()));
}

double cr(std::span<const std::vector<DeviceBatch>> iterations) {
    double comm = 0.0;
    double total = 0.0;
    for (const auto& iter : iterations) {
        for (const auto& d : iter) {
            comm += static_cast<double>(d.comm_tokens);
            total += static_cast<double>(d.tokens);
        }
    }
    if (total == 0.0) throw ValidationError("cr: no tokens in run");
    return comm / total;
}

double ave_t(std::span<const std::vector<DeviceBatch>> iterations) {
    if (iterations.empty()) throw ValidationError("ave_t: no iterations");
    double total = 0.0;
    std::size_t device_count = 0;
    for (const auto& iter : iterations) {
        device_count = std::max(device_count, iter.size());
        for (const auto& d : iter) total += static_cast<double>(d.tokens);
    }
    if (device_count == 0) throw ValidationError("ave_t: no devices");
    return total / (static_cast<double>(iterations.size()) *
                    static_cast<double>(device_count));
}

MetricsReport report(const Plan& plan) {
    if (plan.iterations.empty()) {
        throw ValidationError("metrics report: empty plan");
    }
    MetricsReport rep;
    rep.per_iteration.reserve(plan.iterations.size());

    double comm = 0.0;
    double total = 0.0;
    double pad_gap = 0.0;
    double pad_cap = 0.0;
    for (const auto& it : plan.iterations) {
        IterationTrace trace;
        trace.dbr = dbr(it.devices);
        trace.abr = abr(it.devices);
        rep.per_iteration.push_back(trace);
        for (const auto& d : it.devices) {
            comm += static_cast<double>(d.comm_tokens);
            total += static_cast<double>(d.tokens);
            for (const auto& p : d.packs) {
                pad_gap += static_cast<double>(p.capacity - p.total);
                pad_cap += static_cast<double>(p.capacity);
            }
        }
    }
    double dbr_sum = 0.0, abr_sum = 0.0;
    for (const auto& t : rep.per_iteration) {
        dbr_sum += t.dbr;
        abr_sum += t.abr;
    }
    const auto n_iter = static_cast<double>(plan.iterations.size());
    rep.dbr = dbr_sum / n_iter;
    rep.abr = abr_sum / n_iter;
    rep.cr = total > 0.0 ? comm / total : 0.0;
    rep.pr = pad_cap > 0.0 ? pad_gap / pad_cap : 0.0;
    rep.ave_t = total / (n_iter * static_cast<double>(plan.device_count));
    return rep;
}

} // namespace hbp
