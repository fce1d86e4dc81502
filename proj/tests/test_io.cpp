#include <doctest.h>

#include "hbp/io.hpp"
#include "helpers.hpp"

using namespace hbp;

namespace {

Plan build_sample_plan() {
    const auto corpus = test::hybrid_corpus(300, 0.04, 16384, 131072, 71);
    PlanOptions options;
    options.strategy.kind = StrategyKind::Isf;
    options.device_count = 3;
    options.seed = 9;
    return build_plan(corpus, test::two_level_groups(), options);
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("groups manifest round trips") {
    const auto groups = test::two_level_groups();
    const auto text = groups_to_json(groups);
    const auto parsed = groups_from_json(text);
    CHECK(parsed.groups == groups.groups);
    CHECK(parsed.l_best == groups.l_best);
    CHECK(parsed.l_max == groups.l_max);
    CHECK(groups_to_json(parsed) == text);
}

TEST_CASE("plan manifest round trips bit-exactly") {
    const auto plan = build_sample_plan();
    const auto text = plan_to_json(plan);
    const auto parsed = plan_from_json(text);
    CHECK(plan_to_json(parsed) == text);
    CHECK(parsed.device_count == plan.device_count);
    CHECK(parsed.seed == plan.seed);
    CHECK(parsed.corpus() == plan.corpus());
    REQUIRE(parsed.iterations.size() == plan.iterations.size());
    // derived fields are rebuilt, not stored
    for (std::size_t i = 0; i < plan.iterations.size(); ++i) {
        const auto& a = plan.iterations[i];
        const auto& b = parsed.iterations[i];
        REQUIRE(a.devices.size() == b.devices.size());
        for (std::size_t d = 0; d < a.devices.size(); ++d) {
            CHECK(a.devices[d].tokens == b.devices[d].tokens);
            CHECK(a.devices[d].attention == b.devices[d].attention);
            CHECK(a.devices[d].comm_tokens == b.devices[d].comm_tokens);
        }
    }
}

TEST_CASE("manifests reject wrong versions and junk") {
    CHECK_THROWS_AS(groups_from_json("{\"version\": 999}"), ValidationError);
    CHECK_THROWS_AS(groups_from_json("not json"), ValidationError);
    CHECK_THROWS_AS(plan_from_json("{}"), ValidationError);
}

TEST_CASE("plan manifest validates pack capacities") {
    const std::string bad = R"({
      "device_count": 1,
      "groups": {"groups": [{"ckpt": 0, "length": 4, "sp": 1}],
                  "l_best": 4, "l_max": 4},
      "iterations": [{"devices": [[{"capacity": 4,
                                     "samples": [[0, 3], [1, 3]]}]],
                       "group": 0, "phase": "hybrid"}],
      "seed": 0, "version": 1})";
    CHECK_THROWS_AS(plan_from_json(bad), ValidationError);
}

TEST_CASE("metrics serialize to json and flat text") {
    const auto plan = build_sample_plan();
    const auto rep = report(plan);
    const auto json_text = metrics_to_json(rep);
    CHECK(json_text.find("\"abr\"") != std::string::npos);
    CHECK(json_text.find("\"per_iteration\"") != std::string::npos);
    const auto flat = metrics_to_text(rep);
    CHECK(flat.find("dbr ") == 0);
    CHECK(flat.find("ave_t ") != std::string::npos);
}

TEST_CASE("sim report and compare formats") {
    const auto plan = build_sample_plan();
    const auto report = simulate(plan, HardwareProfile::defaults(), "demo");
    const auto json_text = sim_report_to_json(report);
    CHECK(json_text.find("\"gpu_days\"") != std::string::npos);
    CHECK(json_text.find("\"iterations\"") == std::string::npos);
    const auto with_iters = sim_report_to_json(report, true);
    CHECK(with_iters.find("\"iterations\"") != std::string::npos);
    CHECK(sim_report_to_text(report).find("gpu_days") != std::string::npos);

    const SimReport reports[] = {report, report};
    const auto rows = compare(reports);
    const auto csv = compare_to_csv(rows);
    CHECK(csv.rfind("name,total_seconds,gpu_days,speedup", 0) == 0);
    CHECK(compare_to_text(rows).find("demo") != std::string::npos);
}

TEST_CASE("missing files raise io errors") {
    CHECK_THROWS_AS(read_plan("/nonexistent/path/plan.json"), IoError);
    CHECK_THROWS_AS(read_groups("/nonexistent/path/groups.json"), IoError);
    CHECK_THROWS_AS(TableProfiler::from_csv_file("/nonexistent/table.csv"),
                    IoError);
}

} // TEST_SUITE
