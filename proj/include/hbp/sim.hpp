#ifndef HBP_SIM_HPP
#define HBP_SIM_HPP

#include <span>
#include <string>
#include <vector>

#include "hbp/balance.hpp"
#include "hbp/costmodel.hpp"
#include "hbp/metrics.hpp"

namespace hbp {

struct DeviceSim {
    double compute_seconds = 0.0; // includes recompute
    double comm_seconds = 0.0;
    double idle_seconds = 0.0;    // iteration max minus own busy time
    Tokens tokens = 0;
};

struct IterationSim {
    double seconds = 0.0; // max over devices
    std::vector<DeviceSim> devices;
};

struct SimReport {
    std::string name;
    int device_count = 0;
    double total_seconds = 0.0;
    double gpu_days = 0.0; // total_seconds * N / 86400
    int switch_count = 0;
    MetricsReport metrics;
    CorpusFingerprint corpus;
    std::vector<IterationSim> iterations;
};

// Evaluates a plan under the analytic profile: synchronous steps, each
// costing the max over devices. Throws InfeasibleError naming the iteration
// when a group's configuration does not fit device memory.
SimReport simulate(const Plan& plan, const HardwareProfile& profile,
                   const std::string& name = "");

struct CompareRow {
    std::string name;
    double total_seconds = 0.0;
    double gpu_days = 0.0;
    double speedup = 1.0; // baseline_seconds / this
    double abr = 0.0;
    double cr = 0.0;
    double dbr = 0.0;
    double pr = 0.0;
};

// Speedups against reports[0]; rows sorted ascending by speedup. All reports
// must describe the same corpus (same sample-id multiset).
std::vector<CompareRow> compare(std::span<const SimReport> reports);

} // namespace hbp

#endif // HBP_SIM_HPP
