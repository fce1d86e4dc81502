#include "hbp/sim.hpp"

#include <algorithm>

#include "hbp/schedule.hpp"

namespace hbp {

SimReport simulate(const Plan& plan, const HardwareProfile& profile,
                   const std::string& name) {
    profile.validate();
    if (plan.iterations.empty()) {
        throw ValidationError("simulate: empty plan");
    }

    SimReport report;
    report.name = name;
    report.device_count = plan.device_count;
    report.metrics = hbp::report(plan);
    report.switch_count = assign_runtime(plan).switch_count;
    report.corpus = plan.corpus();
    report.iterations.reserve(plan.iterations.size());

    for (std::size_t i = 0; i < plan.iterations.size(); ++i) {
        const auto& it = plan.iterations[i];
        const auto& config = plan.group_of(it).config;
        IterationSim iter_sim;
        iter_sim.devices.reserve(it.devices.size());
        for (const auto& device : it.devices) {
            DeviceSim dev;
            dev.tokens = device.tokens;
            const DeviceWork work = device_work(device.packs);
            double busy = 0.0;
            try {
                busy = iter_time(work, config, profile);
            } catch (const InfeasibleError& e) {
                throw InfeasibleError("iteration " + std::to_string(i) + ": " +
                                      e.what());
            }
            const double comm =
                config.sp > 1 ? profile.sp_comm_cost *
                                    static_cast<double>(work.padded_tokens) *
                                    static_cast<double>(config.sp - 1)
                              : 0.0;
            dev.comm_seconds = comm;
            dev.compute_seconds = busy - comm;
            iter_sim.devices.push_back(dev);
            iter_sim.seconds = std::max(iter_sim.seconds, busy);
        }
        for (auto& dev : iter_sim.devices) {
            dev.idle_seconds =
                iter_sim.seconds - (dev.compute_seconds + dev.comm_seconds);
        }
        report.total_seconds += iter_sim.seconds;
        report.iterations.push_back(std::move(iter_sim));
    }
    report.gpu_days = report.total_seconds *
                      static_cast<double>(plan.device_count) / 86400.0;
    return report;
}

std::vector<CompareRow> compare(std::span<const SimReport> reports) {
    if (reports.size() < 2) {
        throw ValidationError("compare needs at least two reports");
    }
    const auto& baseline = reports.front();
    for (const auto& r : reports) {
        if (!(r.corpus == baseline.corpus)) {
            throw ValidationError("compare: report '" + r.name +
                                  "' describes a different corpus than '" +
                                  baseline.name + "'");
        }
    }
    std::vector<CompareRow> rows;
    rows.reserve(reports.size());
    for (const auto& r : reports) {
        CompareRow row;
        row.name = r.name;
        row.total_seconds = r.total_seconds;
        row.gpu_days = r.gpu_days;
        row.speedup = baseline.total_seconds / r.total_seconds;
        row.abr = r.metrics.abr;
        row.cr = r.metrics.cr;
        row.dbr = r.metrics.dbr;
        row.pr = r.metrics.pr;
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const CompareRow& a, const CompareRow& b) {
                         return a.speedup < b.speedup;
                     });
    return rows;
}

} // namespace hbp
