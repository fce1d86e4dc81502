// Command-line front end for the hierarchical balance packing planner.
//
// Subcommands mirror the pipeline stages so every artifact is inspectable:
//   select-groups  profile candidate lengths and emit a groups manifest
//   pack           build a plan (packing + greedy fill + batching) + metrics
//   schedule       curriculum-reorder a plan and export the schedule CSV
//   simulate       evaluate a plan under an analytic hardware profile
//   compare        simulate several plans over one corpus and rank speedups
//   metrics        recompute the metrics report of a stored plan
//
// Exit codes: 0 success, 2 validation, 3 infeasibility, 4 I/O.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hbp/autoselect.hpp"
#include "hbp/balance.hpp"
#include "hbp/costmodel.hpp"
#include "hbp/errors.hpp"
#include "hbp/ingest.hpp"
#include "hbp/io.hpp"
#include "hbp/metrics.hpp"
#include "hbp/schedule.hpp"
#include "hbp/sim.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

struct ProfileSpec {
    bool table = false;
    std::string path; // empty -> built-in analytic defaults
};

ProfileSpec parse_profile_spec(const std::string& text) {
    ProfileSpec spec;
    if (text == "analytic" || text.empty()) return spec;
    if (text.rfind("analytic:", 0) == 0) {
        spec.path = text.substr(9);
        return spec;
    }
    if (text.rfind("table:", 0) == 0) {
        spec.table = true;
        spec.path = text.substr(6);
        return spec;
    }
    throw hbp::ValidationError(
        "bad --profile (want analytic, analytic:FILE or table:FILE): " + text);
}

fs::path resolve_profile_path(const std::string& raw) {
    fs::path p(raw);
    if (fs::exists(p)) return p;
    if (p.is_relative()) {
        if (const char* dir = std::getenv("HBP_PROFILE_DIR")) {
            const fs::path alt = fs::path(dir) / p;
            if (fs::exists(alt)) return alt;
        }
    }
    return p; // let the loader report the miss
}

std::unique_ptr<hbp::Profiler> make_profiler(const ProfileSpec& spec) {
    if (spec.table) {
        return std::make_unique<hbp::TableProfiler>(
            hbp::TableProfiler::from_csv_file(resolve_profile_path(spec.path)));
    }
    hbp::HardwareProfile profile =
        spec.path.empty()
            ? hbp::HardwareProfile::defaults()
            : hbp::load_analytic_profile_file(resolve_profile_path(spec.path));
    return std::make_unique<hbp::AnalyticProfiler>(profile);
}

hbp::HardwareProfile make_hardware_profile(const ProfileSpec& spec) {
    if (spec.table) {
        throw hbp::ValidationError(
            "this command needs an analytic profile (table profiles only "
            "replay measured points)");
    }
    return spec.path.empty()
               ? hbp::HardwareProfile::defaults()
               : hbp::load_analytic_profile_file(resolve_profile_path(spec.path));
}

hbp::SampleSet load_corpus(const std::string& corpus, const std::string& format,
                           const std::string& synth, std::uint64_t seed,
                           hbp::Tokens max_length,
                           const std::string& max_policy) {
    if (!corpus.empty() && !synth.empty()) {
        throw hbp::ValidationError("--corpus and --synth are mutually exclusive");
    }
    hbp::SampleSet set;
    if (!synth.empty()) {
        set = hbp::synth_lengths(hbp::parse_synth_spec(synth, seed));
    } else if (!corpus.empty()) {
        set = hbp::load_lengths(fs::path(corpus),
                                hbp::parse_corpus_format(format));
    } else {
        throw hbp::ValidationError("one of --corpus or --synth is required");
    }
    if (max_length > 0) {
        hbp::OverlongPolicy policy = hbp::OverlongPolicy::Error;
        if (max_policy == "truncate") {
            policy = hbp::OverlongPolicy::TruncateToMax;
        } else if (max_policy == "drop") {
            policy = hbp::OverlongPolicy::Drop;
        } else if (max_policy != "error") {
            throw hbp::ValidationError("bad --max-policy (error|truncate|drop): " +
                                       max_policy);
        }
        set = hbp::apply_length_cap(set, max_length, policy);
        set.validate();
    }
    return set;
}

void ensure_out_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw hbp::IoError("cannot create output directory: " + dir.string());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical balance packing planner and simulator"};
    app.require_subcommand(1);
    app.fallthrough(); // --seed may follow the subcommand

    std::uint64_t seed = 0;
    app.add_option("--seed", seed, "Seed for every random choice")
        ->capture_default_str();

    // --- select-groups -----------------------------------------------------
    auto* cmd_select = app.add_subcommand(
        "select-groups", "Profile candidate lengths and emit a groups manifest");
    std::vector<hbp::Tokens> lengths = {8192, 16384, 32768, 65536, 131072};
    std::vector<int> sp_candidates = {1, 2, 4, 8, 16};
    std::string select_profile = "analytic";
    std::string select_out = "groups.json";
    bool select_json = false;
    cmd_select->add_option("--lengths", lengths,
                           "Candidate packing lengths (ascending tokens)")
        ->delimiter(',');
    cmd_select->add_option("--sp", sp_candidates,
                           "Sequence-parallel degree candidates")
        ->delimiter(',');
    cmd_select->add_option("--profile", select_profile,
                           "analytic | analytic:FILE | table:FILE");
    cmd_select->add_option("--out", select_out, "Groups manifest path")
        ->capture_default_str();
    cmd_select->add_flag("--json", select_json, "Print the manifest JSON");

    // --- pack ---------------------------------------------------------------
    auto* cmd_pack = app.add_subcommand(
        "pack", "Group, pack, greedy-fill and batch a corpus into a plan");
    std::string pack_corpus, pack_format = "jsonl", pack_synth;
    std::string pack_groups;
    std::string pack_strategy = "isf";
    std::string pack_batching = "balance";
    std::string pack_max_policy = "error";
    int pack_devices = 4;
    std::string pack_out = "out";
    bool pack_json = false;
    bool pack_no_fill = false;
    cmd_pack->add_option("--corpus", pack_corpus, "Length corpus file");
    cmd_pack->add_option("--format", pack_format, "jsonl | csv | raw-lengths");
    cmd_pack->add_option("--synth", pack_synth,
                         "Synthetic corpus spec, e.g. count=10000,"
                         "long_fraction=0.02,short=lognormal:7.2:0.7,"
                         "long=uniform:16385:131072,max=131072");
    cmd_pack->add_option("--groups", pack_groups, "Groups manifest from "
                                                  "select-groups");
    cmd_pack->add_option("--strategy", pack_strategy,
                         "random | isf | ffs | ffd | bfs | spfhp");
    cmd_pack
        ->add_option("--batching", pack_batching,
                     "balance | random-packs | padded-sorted | padded-random")
        ->capture_default_str();
    cmd_pack->add_option("--devices", pack_devices, "Data-parallel ranks")
        ->capture_default_str();
    cmd_pack->add_option("--max-policy", pack_max_policy,
                         "Over-length samples: error | truncate | drop");
    cmd_pack->add_option("--out", pack_out, "Output directory")
        ->capture_default_str();
    cmd_pack->add_flag("--json", pack_json, "Print metrics as JSON");
    cmd_pack->add_flag("--no-greedy-fill", pack_no_fill,
                       "Skip the greedy fill stage");

    // --- schedule ------------------------------------------------------------
    auto* cmd_schedule = app.add_subcommand(
        "schedule", "Apply curriculum ordering and export the schedule CSV");
    std::string sched_plan;
    int warmup_iters = 500;
    int short_cutoff = 1;
    std::string sched_out = "out";
    cmd_schedule->add_option("--plan", sched_plan, "Plan manifest")->required();
    cmd_schedule->add_option("--warmup-iters", warmup_iters,
                             "Short-group-only warmup steps")
        ->capture_default_str();
    cmd_schedule->add_option("--short-cutoff", short_cutoff,
                             "Groups below this index count as short")
        ->capture_default_str();
    cmd_schedule->add_option("--out", sched_out, "Output directory")
        ->capture_default_str();

    // --- simulate ------------------------------------------------------------
    auto* cmd_simulate = app.add_subcommand(
        "simulate", "Evaluate a plan under an analytic hardware profile");
    std::string sim_plan, sim_profile = "analytic", sim_name;
    std::string sim_out;
    bool sim_json = false;
    cmd_simulate->add_option("--plan", sim_plan, "Plan manifest")->required();
    cmd_simulate->add_option("--profile", sim_profile,
                             "analytic | analytic:FILE");
    cmd_simulate->add_option("--name", sim_name, "Report name");
    cmd_simulate->add_option("--out", sim_out,
                             "Directory for sim_report.json (optional)");
    cmd_simulate->add_flag("--json", sim_json, "Print the report as JSON");

    // --- compare -------------------------------------------------------------
    auto* cmd_compare = app.add_subcommand(
        "compare", "Simulate plans over one corpus and rank speedups");
    std::vector<std::string> cmp_plans;
    std::string cmp_profile = "analytic";
    std::string cmp_out;
    bool cmp_json = false;
    cmd_compare->add_option("--plan", cmp_plans,
                            "Plan manifests (first = baseline; repeatable)")
        ->required()
        ->expected(-2);
    cmd_compare->add_option("--profile", cmp_profile,
                            "analytic | analytic:FILE");
    cmd_compare->add_option("--out", cmp_out,
                            "Directory for compare.csv (optional)");
    cmd_compare->add_flag("--json", cmp_json, "Print rows as JSON");

    // --- metrics -------------------------------------------------------------
    auto* cmd_metrics = app.add_subcommand(
        "metrics", "Recompute the metrics report of a stored plan");
    std::string metrics_plan;
    bool metrics_json = false;
    cmd_metrics->add_option("--plan", metrics_plan, "Plan manifest")
        ->required();
    cmd_metrics->add_flag("--json", metrics_json, "Print JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_select) {
            auto profiler = make_profiler(parse_profile_spec(select_profile));
            const auto groups =
                hbp::select_groups(lengths, *profiler, sp_candidates);
            hbp::write_groups(groups, fs::path(select_out));
            if (select_json) {
                std::cout << hbp::groups_to_json(groups);
            } else {
                for (const auto& g : groups.groups) {
                    std::cout << "group length=" << g.length
                              << " sp=" << g.config.sp
                              << " ckpt=" << g.config.ckpt << "\n";
                }
                std::cout << "wrote " << select_out << "\n";
            }
        } else if (*cmd_pack) {
            if (pack_groups.empty()) {
                throw hbp::ValidationError("--groups manifest is required");
            }
            const auto groups = hbp::read_groups(fs::path(pack_groups));
            const auto samples =
                load_corpus(pack_corpus, pack_format, pack_synth, seed,
                            groups.l_max, pack_max_policy);

            hbp::Plan plan;
            if (pack_batching == "balance" || pack_batching == "random-packs") {
                hbp::PlanOptions options;
                options.strategy.kind = hbp::parse_strategy(pack_strategy);
                options.device_count = pack_devices;
                options.seed = seed;
                options.balance_batching = pack_batching == "balance";
                options.greedy_fill = !pack_no_fill;
                plan = hbp::build_plan(samples, groups, options);
            } else if (pack_batching == "padded-sorted" ||
                       pack_batching == "padded-random") {
                if (groups.groups.size() != 1) {
                    throw hbp::ValidationError(
                        "padded batching needs a single-group manifest");
                }
                plan = hbp::build_batching_plan(
                    samples, groups.groups.front(), pack_devices,
                    pack_batching == "padded-sorted"
                        ? hbp::BatchingMode::Sorted
                        : hbp::BatchingMode::Random,
                    seed);
            } else {
                throw hbp::ValidationError("bad --batching: " + pack_batching);
            }

            ensure_out_dir(pack_out);
            hbp::write_plan(plan, fs::path(pack_out) / "plan.json");
            const auto rep = hbp::report(plan);
            hbp::write_text_file(fs::path(pack_out) / "metrics.json",
                                 hbp::metrics_to_json(rep));
            hbp::write_text_file(fs::path(pack_out) / "metrics.txt",
                                 hbp::metrics_to_text(rep));
            std::cout << (pack_json ? hbp::metrics_to_json(rep)
                                    : hbp::metrics_to_text(rep));
        } else if (*cmd_schedule) {
            const auto plan = hbp::read_plan(fs::path(sched_plan));
            hbp::CurriculumSpec spec;
            spec.warmup_iterations = warmup_iters;
            spec.short_group_cutoff = short_cutoff;
            const auto ordered = hbp::curriculum_order(plan, spec);
            ensure_out_dir(sched_out);
            hbp::write_plan(ordered, fs::path(sched_out) / "plan.json");
            std::ostringstream csv;
            hbp::write_schedule_csv(ordered, csv);
            hbp::write_text_file(fs::path(sched_out) / "schedule.csv",
                                 csv.str());
            const auto assignment = hbp::assign_runtime(ordered);
            std::cout << "iterations " << ordered.iterations.size()
                      << " warmup " << warmup_iters << " config_switches "
                      << assignment.switch_count << "\n";
        } else if (*cmd_simulate) {
            const auto plan = hbp::read_plan(fs::path(sim_plan));
            const auto profile =
                make_hardware_profile(parse_profile_spec(sim_profile));
            const std::string name =
                sim_name.empty() ? fs::path(sim_plan).stem().string()
                                 : sim_name;
            const auto report = hbp::simulate(plan, profile, name);
            if (!sim_out.empty()) {
                ensure_out_dir(sim_out);
                hbp::write_text_file(fs::path(sim_out) / "sim_report.json",
                                     hbp::sim_report_to_json(report));
            }
            std::cout << (sim_json ? hbp::sim_report_to_json(report)
                                   : hbp::sim_report_to_text(report));
        } else if (*cmd_compare) {
            const auto profile =
                make_hardware_profile(parse_profile_spec(cmp_profile));
            std::vector<hbp::SimReport> reports;
            for (const auto& path : cmp_plans) {
                const auto plan = hbp::read_plan(fs::path(path));
                reports.push_back(hbp::simulate(
                    plan, profile, fs::path(path).stem().string()));
            }
            const auto rows = hbp::compare(reports);
            if (!cmp_out.empty()) {
                ensure_out_dir(cmp_out);
                hbp::write_text_file(fs::path(cmp_out) / "compare.csv",
                                     hbp::compare_to_csv(rows));
            }
            std::cout << (cmp_json ? hbp::compare_to_csv(rows)
                                   : hbp::compare_to_text(rows));
        } else if (*cmd_metrics) {
            const auto plan = hbp::read_plan(fs::path(metrics_plan));
            const auto rep = hbp::report(plan);
            std::cout << (metrics_json ? hbp::metrics_to_json(rep)
                                       : hbp::metrics_to_text(rep));
        }
    } catch (const hbp::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const hbp::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const hbp::ValidationError& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
