// Python bindings for the planner. Exposes the main operations: corpus
// loading/synthesis, metrics, packing, group auto-selection, plan building,
// curriculum ordering, loss normalizers and the simulator.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hbp/autoselect.hpp"
#include "hbp/balance.hpp"
#include "hbp/costmodel.hpp"
#include "hbp/errors.hpp"
#include "hbp/ingest.hpp"
#include "hbp/io.hpp"
#include "hbp/metrics.hpp"
#include "hbp/packing.hpp"
#include "hbp/schedule.hpp"
#include "hbp/sim.hpp"

namespace py = pybind11;
using namespace hbp;

namespace {

SampleSet sample_set_from_lengths(const std::vector<Tokens>& lengths,
                                  const std::string& source) {
    SampleSet set;
    set.source = source;
    set.samples.reserve(lengths.size());
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        set.samples.push_back(Sample{static_cast<SampleId>(i), lengths[i]});
    }
    set.validate();
    return set;
}

std::vector<Tokens> lengths_of(const SampleSet& set) {
    std::vector<Tokens> out;
    out.reserve(set.samples.size());
    for (const auto& s : set.samples) out.push_back(s.length);
    return out;
}

} // namespace

PYBIND11_MODULE(hbp, m) {
    m.doc() = "Hierarchical balance packing planner and workload simulator";

    py::register_exception<ValidationError>(m, "ValidationError",
                                            PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError",
                                            PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<Sample>(m, "Sample")
        .def(py::init<SampleId, Tokens>(), py::arg("id"), py::arg("length"))
        .def_readwrite("id", &Sample::id)
        .def_readwrite("length", &Sample::length)
        .def("__repr__", [](const Sample& s) {
            return "Sample(id=" + std::to_string(s.id) +
                   ", length=" + std::to_string(s.length) + ")";
        });

    py::class_<SampleSet>(m, "SampleSet")
        .def(py::init(&sample_set_from_lengths), py::arg("lengths"),
             py::arg("source") = "python")
        .def_readonly("samples", &SampleSet::samples)
        .def_readonly("source", &SampleSet::source)
        .def_property_readonly("lengths", &lengths_of)
        .def("total_tokens", &SampleSet::total_tokens)
        .def("__len__", &SampleSet::size);

    m.def(
        "load_lengths",
        [](const std::filesystem::path& path, const std::string& format) {
            return load_lengths(path, parse_corpus_format(format));
        },
        py::arg("path"), py::arg("format") = "jsonl");

    m.def(
        "synth_lengths",
        [](std::int64_t count, const std::string& short_dist,
           double long_fraction, const std::string& long_dist,
           Tokens max_length, std::uint64_t seed) {
            SynthSpec spec;
            spec.count = count;
            spec.short_dist = parse_distribution(short_dist);
            spec.long_fraction = long_fraction;
            spec.long_dist = long_dist.empty() ? spec.short_dist
                                               : parse_distribution(long_dist);
            spec.max_length = max_length;
            spec.seed = seed;
            return synth_lengths(spec);
        },
        py::arg("count"), py::arg("short_dist"), py::arg("long_fraction") = 0.0,
        py::arg("long_dist") = std::string(), py::arg("max_length") = 131072,
        py::arg("seed") = 0);

    py::class_<Pack>(m, "Pack")
        .def_readonly("samples", &Pack::samples)
        .def_readonly("capacity", &Pack::capacity)
        .def_readonly("total", &Pack::total)
        .def_readonly("attention", &Pack::attention);

    py::class_<DeviceBatch>(m, "DeviceBatch")
        .def_readonly("device_index", &DeviceBatch::device_index)
        .def_readonly("packs", &DeviceBatch::packs)
        .def_readonly("tokens", &DeviceBatch::tokens)
        .def_readonly("comm_tokens", &DeviceBatch::comm_tokens)
        .def_readonly("attention", &DeviceBatch::attention);

    // Metrics over explicit numbers: build throwaway batches from
    // (tokens, attention) pairs.
    m.def(
        "dbr",
        [](const std::vector<Tokens>& tokens) {
            std::vector<DeviceBatch> devices;
            for (std::size_t i = 0; i < tokens.size(); ++i) {
                Pack p = Pack::make(tokens[i]);
                if (tokens[i] > 0) p.add(Sample{static_cast<SampleId>(i), tokens[i]});
                devices.push_back(DeviceBatch::build(static_cast<int>(i),
                                                     {std::move(p)}, false));
            }
            return dbr(devices);
        },
        py::arg("tokens"), "DBR of per-device token counts");

    m.def(
        "abr",
        [](const std::vector<std::vector<Tokens>>& device_packs) {
            std::vector<DeviceBatch> devices;
            for (std::size_t i = 0; i < device_packs.size(); ++i) {
                Tokens total = 0;
                for (const auto t : device_packs[i]) total += t;
                Pack p = Pack::make(total);
                SampleId id = 0;
                for (const auto t : device_packs[i]) p.add(Sample{id++, t});
                devices.push_back(DeviceBatch::build(static_cast<int>(i),
                                                     {std::move(p)}, false));
            }
            return abr(devices);
        },
        py::arg("device_lengths"),
        "ABR of per-device sample-length lists (attention = sum of squares)");

    m.def(
        "pr",
        [](const std::vector<Tokens>& lengths, Tokens t_max) {
            return pr(lengths, t_max);
        },
        py::arg("lengths"), py::arg("t_max"));

    py::class_<PackingStrategy>(m, "PackingStrategy")
        .def(py::init([](const std::string& kind, int isf_iterations,
                         double isf_fill_threshold) {
                 PackingStrategy s;
                 s.kind = parse_strategy(kind);
                 s.isf_iterations = isf_iterations;
                 s.isf_fill_threshold = isf_fill_threshold;
                 s.validate();
                 return s;
             }),
             py::arg("kind") = "isf", py::arg("isf_iterations") = 8,
             py::arg("isf_fill_threshold") = 0.98);

    py::class_<PackList>(m, "PackList")
        .def_readonly("packs", &PackList::packs)
        .def_readonly("capacity", &PackList::capacity)
        .def_readonly("leftover", &PackList::leftover);

    m.def(
        "pack",
        [](const SampleSet& samples, Tokens capacity, const std::string& kind,
           std::uint64_t seed) {
            PackingStrategy s;
            s.kind = parse_strategy(kind);
            return pack(samples, capacity, s, seed);
        },
        py::arg("samples"), py::arg("capacity"), py::arg("strategy") = "isf",
        py::arg("seed") = 0);

    py::class_<PaddedBatch>(m, "PaddedBatch")
        .def_readonly("samples", &PaddedBatch::samples)
        .def_readonly("max_length", &PaddedBatch::max_length)
        .def_readonly("padded_tokens", &PaddedBatch::padded_tokens);

    m.def("sorted_batching", &sorted_batching, py::arg("samples"),
          py::arg("token_budget"));

    py::class_<RuntimeConfig>(m, "RuntimeConfig")
        .def(py::init<int, int>(), py::arg("sp") = 1, py::arg("ckpt") = 0)
        .def_readwrite("sp", &RuntimeConfig::sp)
        .def_readwrite("ckpt", &RuntimeConfig::ckpt)
        .def("__repr__", [](const RuntimeConfig& c) {
            return "RuntimeConfig(sp=" + std::to_string(c.sp) +
                   ", ckpt=" + std::to_string(c.ckpt) + ")";
        });

    py::class_<HardwareProfile>(m, "HardwareProfile")
        .def(py::init(&HardwareProfile::defaults))
        .def_readwrite("per_token_linear_cost",
                       &HardwareProfile::per_token_linear_cost)
        .def_readwrite("per_token2_attention_cost",
                       &HardwareProfile::per_token2_attention_cost)
        .def_readwrite("sp_comm_cost", &HardwareProfile::sp_comm_cost)
        .def_readwrite("gc_recompute_factor",
                       &HardwareProfile::gc_recompute_factor)
        .def_readwrite("fixed_iteration_cost",
                       &HardwareProfile::fixed_iteration_cost)
        .def_readwrite("layer_count", &HardwareProfile::layer_count)
        .def_readwrite("base_memory", &HardwareProfile::base_memory)
        .def_readwrite("per_token_activation_memory",
                       &HardwareProfile::per_token_activation_memory)
        .def_readwrite("gc_memory_saving_per_layer",
                       &HardwareProfile::gc_memory_saving_per_layer)
        .def_readwrite("reference_length", &HardwareProfile::reference_length)
        .def_readwrite("device_memory", &HardwareProfile::device_memory);

    py::class_<Profiler>(m, "Profiler");

    py::class_<AnalyticProfiler, Profiler>(m, "AnalyticProfiler")
        .def(py::init<HardwareProfile, int, int>(), py::arg("profile"),
             py::arg("ckpt_min") = 0, py::arg("ckpt_max") = -1)
        .def("profile_time", &AnalyticProfiler::profile_time, py::arg("length"),
             py::arg("config"))
        .def("profile_memory", &AnalyticProfiler::profile_memory,
             py::arg("length"), py::arg("config"))
        .def("derive_ckpt", &AnalyticProfiler::derive_ckpt, py::arg("length"),
             py::arg("sp"));

    py::class_<TableProfiler, Profiler>(m, "TableProfiler")
        .def_static("from_csv_file", &TableProfiler::from_csv_file,
                    py::arg("path"),
                    py::arg("device_memory") = std::int64_t{80LL << 30})
        .def("profile_time", &TableProfiler::profile_time, py::arg("length"),
             py::arg("config"))
        .def("profile_memory", &TableProfiler::profile_memory,
             py::arg("length"), py::arg("config"))
        .def("derive_ckpt", &TableProfiler::derive_ckpt, py::arg("length"),
             py::arg("sp"));

    m.def(
        "greedy_profile_ckpt",
        [](const Profiler& profiler, Tokens l, int sp, int ckpt_min,
           int ckpt_max) {
            return greedy_profile_ckpt(profiler, l, sp, ckpt_min, ckpt_max);
        },
        py::arg("profiler"), py::arg("length"), py::arg("sp"),
        py::arg("ckpt_min"), py::arg("ckpt_max"));

    m.def(
        "find_best_sp_ckpt",
        [](const Profiler& profiler, Tokens l,
           const std::vector<int>& sp_candidates) {
            const auto choice = find_best_sp_ckpt(profiler, l, sp_candidates);
            return py::make_tuple(choice.config, choice.seconds);
        },
        py::arg("profiler"), py::arg("length"), py::arg("sp_candidates"));

    m.def("profiling_overhead", &profiling_overhead, py::arg("length_count"),
          py::arg("sp_count"), py::arg("memory_probe_count"),
          py::arg("profile_iter"), py::arg("iteration_time"));

    py::class_<GroupConfig>(m, "GroupConfig")
        .def(py::init<Tokens, RuntimeConfig>(), py::arg("length"),
             py::arg("config"))
        .def_readwrite("length", &GroupConfig::length)
        .def_readwrite("config", &GroupConfig::config)
        .def("__repr__", [](const GroupConfig& g) {
            return "GroupConfig(length=" + std::to_string(g.length) +
                   ", sp=" + std::to_string(g.config.sp) +
                   ", ckpt=" + std::to_string(g.config.ckpt) + ")";
        });

    py::class_<HierarchicalGroups>(m, "HierarchicalGroups")
        .def_readonly("groups", &HierarchicalGroups::groups)
        .def_readonly("l_best", &HierarchicalGroups::l_best)
        .def_readonly("l_max", &HierarchicalGroups::l_max)
        .def_static("single", &HierarchicalGroups::single, py::arg("group"));

    m.def(
        "select_groups",
        [](const std::vector<Tokens>& lengths, const Profiler& profiler,
           const std::vector<int>& sp_candidates) {
            return select_groups(lengths, profiler, sp_candidates);
        },
        py::arg("candidate_lengths"), py::arg("profiler"),
        py::arg("sp_candidates"));

    py::enum_<Phase>(m, "Phase")
        .value("Warmup", Phase::Warmup)
        .value("Hybrid", Phase::Hybrid);

    py::class_<Iteration>(m, "Iteration")
        .def_readonly("group_index", &Iteration::group_index)
        .def_readonly("devices", &Iteration::devices)
        .def_readonly("phase", &Iteration::phase);

    py::class_<Plan>(m, "Plan")
        .def_readonly("groups", &Plan::groups)
        .def_readonly("iterations", &Plan::iterations)
        .def_readonly("device_count", &Plan::device_count)
        .def_readonly("seed", &Plan::seed)
        .def("to_json", &plan_to_json)
        .def_static("from_json", &plan_from_json, py::arg("text"));

    m.def(
        "build_plan",
        [](const SampleSet& samples, const HierarchicalGroups& groups,
           const std::string& strategy, int device_count, std::uint64_t seed,
           bool balance_batching, bool greedy_fill) {
            PlanOptions options;
            options.strategy.kind = parse_strategy(strategy);
            options.device_count = device_count;
            options.seed = seed;
            options.balance_batching = balance_batching;
            options.greedy_fill = greedy_fill;
            return build_plan(samples, groups, options);
        },
        py::arg("samples"), py::arg("groups"), py::arg("strategy") = "isf",
        py::arg("device_count") = 4, py::arg("seed") = 0,
        py::arg("balance_batching") = true, py::arg("greedy_fill") = true);

    m.def(
        "build_batching_plan",
        [](const SampleSet& samples, GroupConfig group, int device_count,
           const std::string& mode, std::uint64_t seed) {
            const BatchingMode m_ = mode == "sorted" ? BatchingMode::Sorted
                                                     : BatchingMode::Random;
            return build_batching_plan(samples, group, device_count, m_, seed);
        },
        py::arg("samples"), py::arg("group"), py::arg("device_count") = 4,
        py::arg("mode") = "sorted", py::arg("seed") = 0);

    py::class_<IterationTrace>(m, "IterationTrace")
        .def_readonly("dbr", &IterationTrace::dbr)
        .def_readonly("abr", &IterationTrace::abr);

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("dbr", &MetricsReport::dbr)
        .def_readonly("pr", &MetricsReport::pr)
        .def_readonly("abr", &MetricsReport::abr)
        .def_readonly("cr", &MetricsReport::cr)
        .def_readonly("ave_t", &MetricsReport::ave_t)
        .def_readonly("per_iteration", &MetricsReport::per_iteration)
        .def("to_json", &metrics_to_json);

    m.def("report", &report, py::arg("plan"));

    py::class_<CurriculumSpec>(m, "CurriculumSpec")
        .def(py::init([](int warmup, int cutoff) {
                 CurriculumSpec s;
                 s.warmup_iterations = warmup;
                 s.short_group_cutoff = cutoff;
                 return s;
             }),
             py::arg("warmup_iterations") = 500,
             py::arg("short_group_cutoff") = 1);

    m.def("curriculum_order", &curriculum_order, py::arg("plan"),
          py::arg("spec"));

    m.def(
        "assign_runtime",
        [](const Plan& plan) {
            const auto a = assign_runtime(plan);
            return py::make_tuple(a.per_iteration, a.switch_count);
        },
        py::arg("plan"));

    m.def(
        "normalize_loss",
        [](const std::vector<std::vector<std::pair<double, Tokens>>>& ranks,
           const std::string& mode) {
            std::vector<std::vector<SampleLoss>> converted;
            converted.reserve(ranks.size());
            for (const auto& rank : ranks) {
                std::vector<SampleLoss> r;
                r.reserve(rank.size());
                for (const auto& [loss, tokens] : rank) {
                    r.push_back(SampleLoss{loss, tokens});
                }
                converted.push_back(std::move(r));
            }
            const auto result = normalize_loss(converted, parse_loss_mode(mode));
            return py::make_tuple(result.per_rank, result.final_loss);
        },
        py::arg("ranks"), py::arg("mode") = "ave_token",
        "ranks: list of [(loss, tokens), ...] per DP rank; returns "
        "(per_rank, final)");

    py::class_<SimReport>(m, "SimReport")
        .def_readonly("name", &SimReport::name)
        .def_readonly("device_count", &SimReport::device_count)
        .def_readonly("total_seconds", &SimReport::total_seconds)
        .def_readonly("gpu_days", &SimReport::gpu_days)
        .def_readonly("switch_count", &SimReport::switch_count)
        .def_readonly("metrics", &SimReport::metrics)
        .def("to_json", [](const SimReport& r) {
            return sim_report_to_json(r);
        });

    m.def("simulate", &simulate, py::arg("plan"), py::arg("profile"),
          py::arg("name") = "");

    py::class_<CompareRow>(m, "CompareRow")
        .def_readonly("name", &CompareRow::name)
        .def_readonly("total_seconds", &CompareRow::total_seconds)
        .def_readonly("gpu_days", &CompareRow::gpu_days)
        .def_readonly("speedup", &CompareRow::speedup)
        .def_readonly("abr", &CompareRow::abr)
        .def_readonly("cr", &CompareRow::cr)
        .def_readonly("dbr", &CompareRow::dbr)
        .def_readonly("pr", &CompareRow::pr);

    m.def(
        "compare",
        [](const std::vector<SimReport>& reports) { return compare(reports); },
        py::arg("reports"));

    m.def("read_groups", &read_groups, py::arg("path"));
    m.def("write_groups", &write_groups, py::arg("groups"), py::arg("path"));
    m.def("read_plan", &read_plan, py::arg("path"));
    m.def("write_plan", &write_plan, py::arg("plan"), py::arg("path"));
}
