#ifndef HBP_IO_HPP
#define HBP_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hbp/autoselect.hpp"
#include "hbp/balance.hpp"
#include "hbp/metrics.hpp"
#include "hbp/sim.hpp"

namespace hbp {

// Groups manifest: versioned JSON of (length, sp, ckpt) triples.
std::string groups_to_json(const HierarchicalGroups& groups);
HierarchicalGroups groups_from_json(const std::string& text);
void write_groups(const HierarchicalGroups& groups,
                  const std::filesystem::path& path);
HierarchicalGroups read_groups(const std::filesystem::path& path);

// Plan manifest: versioned JSON with header (groups, device count, seed) and
// one record per iteration mapping devices to packs of (id, length) pairs.
// Serialization is canonical, so save/load/save round-trips bit-exactly.
std::string plan_to_json(const Plan& plan);
Plan plan_from_json(const std::string& text);
void write_plan(const Plan& plan, const std::filesystem::path& path);
Plan read_plan(const std::filesystem::path& path);

// Metrics report: machine JSON and a flat key/value text form.
std::string metrics_to_json(const MetricsReport& report);
std::string metrics_to_text(const MetricsReport& report);

// Sim report as JSON and a human-readable table; comparison rows as CSV.
std::string sim_report_to_json(const SimReport& report,
                               bool include_iterations = false);
std::string sim_report_to_text(const SimReport& report);
std::string compare_to_csv(const std::vector<CompareRow>& rows);
std::string compare_to_text(const std::vector<CompareRow>& rows);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

} // namespace hbp

#endif // HBP_IO_HPP
