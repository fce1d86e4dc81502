#include "hbp/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace hbp {

namespace {

using nlohmann::json;

constexpr int kManifestVersion = 1;

json groups_to_obj(const HierarchicalGroups& groups) {
    json arr = json::array();
    for (const auto& g : groups.groups) {
        arr.push_back({{"ckpt", g.config.ckpt},
                       {"length", g.length},
                       {"sp", g.config.sp}});
    }
    return json{{"groups", arr},
                {"l_best", groups.l_best},
                {"l_max", groups.l_max}};
}

HierarchicalGroups groups_from_obj(const json& obj) {
    HierarchicalGroups groups;
    for (const auto& g : obj.at("groups")) {
        GroupConfig gc;
        gc.length = g.at("length").get<Tokens>();
        gc.config.sp = g.at("sp").get<int>();
        gc.config.ckpt = g.at("ckpt").get<int>();
        groups.groups.push_back(gc);
    }
    groups.l_best = obj.at("l_best").get<Tokens>();
    groups.l_max = obj.at("l_max").get<Tokens>();
    groups.validate();
    return groups;
}

void check_version(const json& obj, const std::string& what) {
    if (!obj.is_object() || !obj.contains("version")) {
        throw ValidationError(what + ": missing version field");
    }
    const int v = obj["version"].get<int>();
    if (v != kManifestVersion) {
        throw ValidationError(what + ": unsupported version " +
                              std::to_string(v));
    }
}

} // namespace

std::string groups_to_json(const HierarchicalGroups& groups) {
    json obj = groups_to_obj(groups);
    obj["version"] = kManifestVersion;
    return obj.dump(2) + "\n";
}

HierarchicalGroups groups_from_json(const std::string& text) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("bad groups manifest: ") + e.what());
    }
    check_version(obj, "groups manifest");
    return groups_from_obj(obj);
}

void write_groups(const HierarchicalGroups& groups,
                  const std::filesystem::path& path) {
    write_text_file(path, groups_to_json(groups));
}

HierarchicalGroups read_groups(const std::filesystem::path& path) {
    return groups_from_json(read_text_file(path));
}

std::string plan_to_json(const Plan& plan) {
    json iterations = json::array();
    for (const auto& it : plan.iterations) {
        json devices = json::array();
        for (const auto& d : it.devices) {
            json packs = json::array();
            for (const auto& p : d.packs) {
                json samples = json::array();
                for (const auto& s : p.samples) {
                    samples.push_back(json::array({s.id, s.length}));
                }
                packs.push_back(
                    {{"capacity", p.capacity}, {"samples", samples}});
            }
            devices.push_back(packs);
        }
        iterations.push_back(
            {{"devices", devices},
             {"group", it.group_index},
             {"phase", it.phase == Phase::Warmup ? "warmup" : "hybrid"}});
    }
    json obj{{"device_count", plan.device_count},
             {"groups", groups_to_obj(plan.groups)},
             {"iterations", iterations},
             {"seed", plan.seed},
             {"version", kManifestVersion}};
    return obj.dump(2) + "\n";
}

Plan plan_from_json(const std::string& text) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("bad plan manifest: ") + e.what());
    }
    check_version(obj, "plan manifest");

    Plan plan;
    plan.groups = groups_from_obj(obj.at("groups"));
    plan.device_count = obj.at("device_count").get<int>();
    plan.seed = obj.at("seed").get<std::uint64_t>();
    for (const auto& it_obj : obj.at("iterations")) {
        Iteration it;
        it.group_index = it_obj.at("group").get<int>();
        if (it.group_index < 0 ||
            it.group_index >= static_cast<int>(plan.groups.groups.size())) {
            throw ValidationError("plan manifest: iteration group index out "
                                  "of range");
        }
        it.phase = it_obj.at("phase").get<std::string>() == "warmup"
                       ? Phase::Warmup
                       : Phase::Hybrid;
        const bool sp_comm = plan.groups.groups
                                 [static_cast<std::size_t>(it.group_index)]
                                     .config.sp > 1;
        int device_index = 0;
        for (const auto& dev_obj : it_obj.at("devices")) {
            std::vector<Pack> packs;
            for (const auto& pack_obj : dev_obj) {
                Pack p = Pack::make(pack_obj.at("capacity").get<Tokens>());
                for (const auto& s : pack_obj.at("samples")) {
                    p.add(Sample{s.at(0).get<SampleId>(),
                                 s.at(1).get<Tokens>()});
                }
                if (p.total > p.capacity) {
                    throw ValidationError(
                        "plan manifest: pack exceeds its capacity");
                }
                packs.push_back(std::move(p));
            }
            it.devices.push_back(
                DeviceBatch::build(device_index++, std::move(packs), sp_comm));
        }
        plan.iterations.push_back(std::move(it));
    }
    return plan;
}

void write_plan(const Plan& plan, const std::filesystem::path& path) {
    write_text_file(path, plan_to_json(plan));
}

Plan read_plan(const std::filesystem::path& path) {
    return plan_from_json(read_text_file(path));
}

std::string metrics_to_json(const MetricsReport& report) {
    json traces = json::array();
    for (const auto& t : report.per_iteration) {
        traces.push_back(json::array({t.dbr, t.abr}));
    }
    json obj{{"abr", report.abr},       {"ave_t", report.ave_t},
             {"cr", report.cr},         {"dbr", report.dbr},
             {"per_iteration", traces}, {"pr", report.pr}};
    return obj.dump(2) + "\n";
}

std::string metrics_to_text(const MetricsReport& report) {
    std::ostringstream os;
    os << std::setprecision(6) << std::fixed;
    os << "dbr " << report.dbr << "\n"
       << "pr " << report.pr << "\n"
       << "abr " << report.abr << "\n"
       << "cr " << report.cr << "\n"
       << "ave_t " << std::setprecision(1) << report.ave_t << "\n";
    return os.str();
}

std::string sim_report_to_json(const SimReport& report,
                               bool include_iterations) {
    json obj{{"corpus",
              {{"id_hash", report.corpus.id_hash},
               {"sample_count", report.corpus.sample_count},
               {"total_tokens", report.corpus.total_tokens}}},
             {"device_count", report.device_count},
             {"gpu_days", report.gpu_days},
             {"metrics",
              {{"abr", report.metrics.abr},
               {"ave_t", report.metrics.ave_t},
               {"cr", report.metrics.cr},
               {"dbr", report.metrics.dbr},
               {"pr", report.metrics.pr}}},
             {"name", report.name},
             {"switch_count", report.switch_count},
             {"total_seconds", report.total_seconds}};
    if (include_iterations) {
        json iters = json::array();
        for (const auto& it : report.iterations) {
            json devices = json::array();
            for (const auto& d : it.devices) {
                devices.push_back({{"comm_seconds", d.comm_seconds},
                                   {"compute_seconds", d.compute_seconds},
                                   {"idle_seconds", d.idle_seconds},
                                   {"tokens", d.tokens}});
            }
            iters.push_back({{"devices", devices}, {"seconds", it.seconds}});
        }
        obj["iterations"] = iters;
    }
    return obj.dump(2) + "\n";
}

std::string sim_report_to_text(const SimReport& report) {
    double idle = 0.0;
    for (const auto& it : report.iterations) {
        for (const auto& d : it.devices) idle += d.idle_seconds;
    }
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    os << "plan            " << report.name << "\n"
       << "devices         " << report.device_count << "\n"
       << "iterations      " << report.iterations.size() << "\n"
       << "total_seconds   " << report.total_seconds << "\n"
       << "gpu_days        " << std::setprecision(4) << report.gpu_days
       << std::setprecision(3) << "\n"
       << "idle_seconds    " << idle << "\n"
       << "config_switches " << report.switch_count << "\n"
       << std::setprecision(6) << "dbr " << report.metrics.dbr << "  pr "
       << report.metrics.pr << "  abr " << report.metrics.abr << "  cr "
       << report.metrics.cr << "  ave_t " << std::setprecision(1)
       << report.metrics.ave_t << "\n";
    return os.str();
}

std::string compare_to_csv(const std::vector<CompareRow>& rows) {
    std::ostringstream os;
    os << "name,total_seconds,gpu_days,speedup,abr,cr,dbr,pr\n";
    os << std::setprecision(10);
    for (const auto& r : rows) {
        os << r.name << ',' << r.total_seconds << ',' << r.gpu_days << ','
           << r.speedup << ',' << r.abr << ',' << r.cr << ',' << r.dbr << ','
           << r.pr << '\n';
    }
    return os.str();
}

std::string compare_to_text(const std::vector<CompareRow>& rows) {
    std::ostringstream os;
    os << std::left << std::setw(24) << "plan" << std::right << std::setw(14)
       << "gpu_days" << std::setw(10) << "speedup" << std::setw(10) << "abr"
       << std::setw(10) << "cr" << std::setw(10) << "pr" << "\n";
    for (const auto& r : rows) {
        os << std::left << std::setw(24) << r.name << std::right << std::fixed
           << std::setprecision(4) << std::setw(14) << r.gpu_days
           << std::setprecision(2) << std::setw(9) << r.speedup << "x"
           << std::setprecision(3) << std::setw(10) << r.abr << std::setw(10)
           << r.cr << std::setw(10) << r.pr << "\n";
    }
    return os.str();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace hbp
