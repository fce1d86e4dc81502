// Acceptance suite: one check per shipping criterion, each timed against its
// stated budget. Prints one PASS/FAIL line per criterion and exits nonzero
// if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hbp/autoselect.hpp"
#include "hbp/balance.hpp"
#include "hbp/costmodel.hpp"
#include "hbp/ingest.hpp"
#include "hbp/io.hpp"
#include "hbp/metrics.hpp"
#include "hbp/rng.hpp"
#include "hbp/schedule.hpp"
#include "hbp/sim.hpp"

using namespace hbp;

namespace {

struct Context {
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<void(Context&)> run;
};

Pack pack_of(const std::vector<Tokens>& lengths, Tokens capacity) {
    Pack p = Pack::make(capacity);
    SampleId id = 0;
    for (const Tokens t : lengths) p.add(Sample{id++, t});
    return p;
}

SampleSet hybrid_corpus_10k(std::uint64_t seed) {
    SynthSpec spec;
    spec.count = 10000;
    spec.short_dist = parse_distribution("lognormal:7.2:0.7");
    spec.long_fraction = 0.02;
    spec.long_dist = parse_distribution("uniform:16385:131072");
    spec.max_length = 131072;
    spec.seed = seed;
    return synth_lengths(spec);
}

HierarchicalGroups measured_groups() {
    const auto table = TableProfiler::from_csv_file(
        std::filesystem::path(HBP_DATA_DIR) / "profiles" /
        "group_candidates_8b.csv");
    const std::vector<Tokens> lengths = {8192, 16384, 32768, 65536, 131072};
    const std::vector<int> sp = {1, 2, 4, 8, 16};
    return select_groups(lengths, table, sp);
}

// Exhaustive pack-pairing oracle for N=2: minimize the worst per-iteration
// ABR over all perfect matchings.
double optimal_worst_abr(const std::vector<Pack>& packs) {
    double best = 2.0;
    std::function<void(std::vector<int>&, double)> recurse =
        [&](std::vector<int>& left, double worst) {
            if (worst >= best) return;
            if (left.empty()) {
                best = worst;
                return;
            }
            const int first = left.front();
            for (std::size_t j = 1; j < left.size(); ++j) {
                std::vector<DeviceBatch> iteration;
                iteration.push_back(DeviceBatch::build(0, {packs[first]},
                                                       false));
                iteration.push_back(
                    DeviceBatch::build(1, {packs[left[j]]}, false));
                const double a = abr(iteration);
                std::vector<int> next;
                for (std::size_t k = 1; k < left.size(); ++k) {
                    if (k != j) next.push_back(left[k]);
                }
                recurse(next, std::max(worst, a));
            }
        };
    std::vector<int> all(packs.size());
    for (std::size_t i = 0; i < packs.size(); ++i) all[i] = static_cast<int>(i);
    recurse(all, 0.0);
    return best;
}

// ---------------------------------------------------------------------------

void criterion_abr_example(Context& ctx) {
    std::vector<DeviceBatch> iteration;
    iteration.push_back(DeviceBatch::build(
        0, {pack_of({1024, 1024, 1024, 1024}, 4096)}, false));
    iteration.push_back(
        DeviceBatch::build(1, {pack_of({2048, 2048}, 4096)}, false));
    const double value = abr(iteration);
    ctx.require(value == 0.25, "ABR of {1K,1K,1K,1K} vs {2K,2K} must be "
                               "exactly 0.25, got " + std::to_string(value));
}

void criterion_stable_normalizer(Context& ctx) {
    Rng rng(20240601);
    for (int trial = 0; trial < 1000; ++trial) {
        const int ranks_n = static_cast<int>(rng.uniform_int(1, 8));
        const int local_batch = static_cast<int>(rng.uniform_int(1, 8));
        std::vector<std::vector<SampleLoss>> ranks;
        double loss_total = 0.0, token_total = 0.0;
        for (int r = 0; r < ranks_n; ++r) {
            std::vector<SampleLoss> rank;
            for (int b = 0; b < local_batch; ++b) {
                SampleLoss s;
                s.loss = rng.next_double() * 50.0 + 1e-3;
                s.tokens = rng.uniform_int(1, 131072);
                loss_total += s.loss;
                token_total += static_cast<double>(s.tokens);
                rank.push_back(s);
            }
            ranks.push_back(std::move(rank));
        }
        const double expected = loss_total / token_total;
        const double got =
            normalize_loss(ranks, LossMode::AveToken).final_loss;
        if (std::abs(got - expected) > 1e-12 * std::abs(expected)) {
            ctx.require(false,
                        "ave_token drifted from sum(loss)/sum(tokens) at "
                        "trial " + std::to_string(trial));
            return;
        }
    }
    // bias witness: rank token totals differ
    const std::vector<std::vector<SampleLoss>> witness = {
        {{4.0, 2}, {1.0, 8}},
        {{2.0, 1000}, {3.0, 2000}},
    };
    const double global = 10.0 / 3010.0;
    const double token_mean =
        normalize_loss(witness, LossMode::TokenMean).final_loss;
    ctx.require(std::abs(token_mean - global) > 1e-6,
                "token_mean should differ from the global ratio when rank "
                "token totals differ");
    const double stable =
        normalize_loss(witness, LossMode::AveToken).final_loss;
    ctx.require(std::abs(stable - global) <= 1e-12 * global,
                "ave_token must still equal the global ratio on the witness");
}

void criterion_group_derivation(Context& ctx) {
    const auto groups = measured_groups();
    ctx.require(groups.groups.size() == 2,
                "expected exactly two groups, got " +
                    std::to_string(groups.groups.size()));
    if (groups.groups.size() != 2) return;
    ctx.require(groups.groups[0].length == 16384 &&
                    groups.groups[0].config.sp == 1,
                "first group must be 16K at sp=1");
    ctx.require(groups.groups[1].length == 131072 &&
                    groups.groups[1].config.sp == 8,
                "second group must be 128K at sp=8");
}

void criterion_balance_quality(Context& ctx) {
    const auto corpus = hybrid_corpus_10k(20250515);
    const auto groups = measured_groups();

    PlanOptions hbp_options;
    hbp_options.strategy.kind = StrategyKind::Isf;
    hbp_options.device_count = 4;
    hbp_options.seed = 1;
    const auto hbp_plan = build_plan(corpus, groups, hbp_options);
    const double hbp_abr = report(hbp_plan).abr;
    ctx.require(hbp_abr <= 0.01, "HBP mean per-iteration ABR must be <= 0.01, "
                                 "got " + std::to_string(hbp_abr));

    HierarchicalGroups naive;
    naive.groups.push_back(GroupConfig{131072, RuntimeConfig{8, 28}});
    naive.l_best = naive.l_max = 131072;
    PlanOptions naive_options = hbp_options;
    naive_options.balance_batching = false;
    const auto naive_plan = build_plan(corpus, naive, naive_options);
    const double naive_abr = report(naive_plan).abr;
    ctx.require(naive_abr >= 0.3, "naive single-level 128K ABR must be >= "
                                  "0.3, got " + std::to_string(naive_abr));
}

void criterion_cr_exactness(Context& ctx) {
    // corpus constructed with exactly 17.3% of tokens above the 16K boundary:
    // 173 samples of 128K (one full pack each) and 827*8 samples of 16K
    SampleSet corpus;
    corpus.source = "cr-exact";
    SampleId id = 0;
    for (int i = 0; i < 173; ++i) {
        corpus.samples.push_back(Sample{id++, 131072});
    }
    for (int i = 0; i < 827 * 8; ++i) {
        corpus.samples.push_back(Sample{id++, 16384});
    }

    const auto groups = measured_groups();
    PlanOptions options;
    options.strategy.kind = StrategyKind::Isf;
    options.device_count = 4;
    options.seed = 9;
    const auto plan = build_plan(corpus, groups, options);
    const auto rep = report(plan);

    // exactness: CR == independently recounted sp>1 token fraction
    double sp_tokens = 0.0, total = 0.0;
    for (const auto& it : plan.iterations) {
        const bool sp = plan.group_of(it).config.sp > 1;
        for (const auto& d : it.devices) {
            total += static_cast<double>(d.tokens);
            if (sp) sp_tokens += static_cast<double>(d.tokens);
        }
    }
    const double recount = sp_tokens / total;
    ctx.require(std::abs(rep.cr - recount) <= 1e-12,
                "CR must equal the recounted sp>1 token fraction");
    ctx.require(std::abs(rep.cr - 0.173) <= 0.001,
                "CR on the constructed corpus must be 0.173 +/- 0.001, got " +
                    std::to_string(rep.cr));

    // and on the hybrid corpus: still exact vs recount
    const auto hybrid = hybrid_corpus_10k(77);
    const auto hybrid_plan = build_plan(hybrid, groups, options);
    const auto hybrid_rep = report(hybrid_plan);
    double h_sp = 0.0, h_total = 0.0;
    for (const auto& it : hybrid_plan.iterations) {
        const bool sp = hybrid_plan.group_of(it).config.sp > 1;
        for (const auto& d : it.devices) {
            h_total += static_cast<double>(d.tokens);
            if (sp) h_sp += static_cast<double>(d.tokens);
        }
    }
    ctx.require(std::abs(hybrid_rep.cr - h_sp / h_total) <= 1e-12,
                "hybrid CR must equal its recount");
}

void criterion_packing_validity(Context& ctx) {
    const StrategyKind kinds[] = {StrategyKind::Random, StrategyKind::Isf,
                                  StrategyKind::Ffs,    StrategyKind::Ffd,
                                  StrategyKind::Bfs,    StrategyKind::Spfhp};
    Rng rng(8675309);
    for (int corpus_idx = 0; corpus_idx < 200; ++corpus_idx) {
        SampleSet corpus;
        corpus.source = "prop";
        const int count = static_cast<int>(rng.uniform_int(20, 250));
        const Tokens capacity = rng.uniform_int(64, 4096);
        for (int i = 0; i < count; ++i) {
            corpus.samples.push_back(
                Sample{i, rng.uniform_int(1, capacity)});
        }
        const std::uint64_t seed = rng.next_u64();
        for (const auto kind : kinds) {
            PackingStrategy strategy;
            strategy.kind = kind;
            const auto a = pack(corpus, capacity, strategy, seed);
            const auto b = pack(corpus, capacity, strategy, seed);

            Tokens total = 0;
            std::size_t samples_seen = 0;
            bool capacity_ok = true;
            for (const auto& p : a.packs) {
                if (p.total > capacity) capacity_ok = false;
                total += p.total;
                samples_seen += p.samples.size();
            }
            if (!capacity_ok) {
                ctx.require(false, "capacity violated by " +
                                       strategy_name(kind));
                return;
            }
            if (samples_seen != corpus.samples.size() ||
                total != corpus.total_tokens()) {
                ctx.require(false, "sample conservation violated by " +
                                       strategy_name(kind));
                return;
            }
            std::ostringstream sa, sb;
            for (const auto& p : a.packs) {
                for (const auto& s : p.samples) sa << s.id << ',';
                sa << ';';
            }
            for (const auto& p : b.packs) {
                for (const auto& s : p.samples) sb << s.id << ',';
                sb << ';';
            }
            if (sa.str() != sb.str()) {
                ctx.require(false, "determinism violated by " +
                                       strategy_name(kind));
                return;
            }
        }
    }

    // PR after GreedyFill stays under 1% on hybrid corpora
    const auto groups = measured_groups();
    for (const std::uint64_t seed : {11ULL, 22ULL, 33ULL}) {
        SynthSpec spec;
        spec.count = 4000;
        spec.short_dist = parse_distribution("lognormal:7.2:0.7");
        spec.long_fraction = 0.02;
        spec.long_dist = parse_distribution("uniform:16385:131072");
        spec.max_length = 131072;
        spec.seed = seed;
        const auto corpus = synth_lengths(spec);

        auto pools = group_data(corpus, groups);
        std::vector<Pack> all_packs;
        for (std::size_t gi = groups.groups.size(); gi-- > 0;) {
            if (pools[gi].samples.empty()) continue;
            SampleSet part;
            part.source = "part";
            part.samples = pools[gi].samples;
            pools[gi].samples.clear();
            PackingStrategy strategy;
            strategy.kind = StrategyKind::Isf;
            auto packed = pack(part, groups.groups[gi].length, strategy, seed);
            if (gi > 0) {
                std::vector<SampleSet> smaller(
                    pools.begin(),
                    pools.begin() + static_cast<std::ptrdiff_t>(gi));
                greedy_fill(packed, smaller);
                for (std::size_t j = 0; j < smaller.size(); ++j) {
                    pools[j].samples = std::move(smaller[j].samples);
                }
            }
            for (const auto& p : packed.packs) all_packs.push_back(p);
        }
        const double fill_pr = pack_pr(all_packs);
        ctx.require(fill_pr <= 0.01,
                    "PR after GreedyFill must be <= 0.01, got " +
                        std::to_string(fill_pr) + " (seed " +
                        std::to_string(seed) + ")");
    }
}

void criterion_batching_oracle(Context& ctx) {
    Rng rng(424242);
    for (int instance = 0; instance < 50; ++instance) {
        PackList list;
        list.capacity = 1 << 20;
        const int pack_count = 2 * static_cast<int>(rng.uniform_int(2, 4));
        for (int p = 0; p < pack_count; ++p) {
            std::vector<Tokens> lengths;
            const int k = static_cast<int>(rng.uniform_int(1, 3));
            for (int i = 0; i < k; ++i) {
                lengths.push_back(rng.uniform_int(37, 9973));
            }
            list.packs.push_back(pack_of(lengths, list.capacity));
        }
        const double optimal = optimal_worst_abr(list.packs);
        double sorted_worst = 0.0;
        for (const auto& it : balance_batching(list, 2, 0, false)) {
            sorted_worst = std::max(sorted_worst, abr(it.devices));
        }
        if (sorted_worst > 2.0 * optimal + 1e-12) {
            ctx.require(false, "sorted batching exceeded 2x the optimum on "
                               "instance " + std::to_string(instance) +
                               " (sorted " + std::to_string(sorted_worst) +
                               ", optimal " + std::to_string(optimal) + ")");
            return;
        }
    }
}

void criterion_speedup_ordering(Context& ctx) {
    const auto profile = HardwareProfile::defaults();
    const auto corpus = hybrid_corpus_10k(31415);

    AnalyticProfiler profiler(profile);
    const std::vector<Tokens> lengths = {8192, 16384, 32768, 65536, 131072};
    const std::vector<int> sp = {1, 2, 4, 8, 16};
    const auto groups = select_groups(lengths, profiler, sp);

    HierarchicalGroups naive;
    naive.groups.push_back(GroupConfig{131072, groups.groups.back().config});
    naive.l_best = naive.l_max = 131072;

    PlanOptions base;
    base.strategy.kind = StrategyKind::Isf;
    base.device_count = 4;
    base.seed = 7;

    PlanOptions naive_opts = base;
    naive_opts.balance_batching = false;
    PlanOptions hier_opts = base;
    hier_opts.balance_batching = false;
    PlanOptions full_opts = base;

    const auto t_naive =
        simulate(build_plan(corpus, naive, naive_opts), profile).total_seconds;
    const auto t_hier =
        simulate(build_plan(corpus, groups, hier_opts), profile).total_seconds;
    const auto t_full =
        simulate(build_plan(corpus, groups, full_opts), profile).total_seconds;

    ctx.require(t_hier < t_naive,
                "hierarchical-only must beat naive (hier " +
                    std::to_string(t_hier) + "s vs naive " +
                    std::to_string(t_naive) + "s)");
    ctx.require(t_full < t_hier,
                "hierarchical+balance must beat hierarchical-only (full " +
                    std::to_string(t_full) + "s vs hier " +
                    std::to_string(t_hier) + "s)");

    // 128K batching ladder: random < sorted < packing
    const GroupConfig level{131072, groups.groups.back().config};
    const auto t_random =
        simulate(build_batching_plan(corpus, level, 4, BatchingMode::Random, 7),
                 profile)
            .total_seconds;
    const auto t_sorted =
        simulate(build_batching_plan(corpus, level, 4, BatchingMode::Sorted, 7),
                 profile)
            .total_seconds;
    ctx.require(t_sorted < t_random, "sorted batching must beat random");
    ctx.require(t_naive < t_sorted,
                "packing must beat sorted batching at 128K (packing " +
                    std::to_string(t_naive) + "s vs sorted " +
                    std::to_string(t_sorted) + "s)");
}

void criterion_greedy_ckpt(Context& ctx) {
    // worked case: probes at 16/32 layers with 2GB/10GB remaining -> 12
    class TwoPoint final : public Profiler {
    public:
        double profile_time(Tokens, RuntimeConfig) const override {
            return 1.0;
        }
        std::int64_t profile_memory(Tokens,
                                    RuntimeConfig config) const override {
            const double slope = (10e9 - 2e9) / (32 - 16);
            return static_cast<std::int64_t>(2e9 +
                                             slope * (config.ckpt - 16));
        }
        int derive_ckpt(Tokens, int) const override { return 0; }
    };
    const int worked = greedy_profile_ckpt(TwoPoint{}, 1024, 1, 16, 32);
    ctx.require(worked == 12, "worked GC case must return 12, got " +
                                  std::to_string(worked));

    Rng rng(5150);
    for (int trial = 0; trial < 100; ++trial) {
        HardwareProfile p = HardwareProfile::defaults();
        p.per_token_activation_memory =
            static_cast<double>(rng.uniform_int(100000, 500000));
        const double keep = 0.05 + 0.3 * rng.next_double();
        p.gc_memory_saving_per_layer = p.per_token_activation_memory *
                                       (1.0 - keep) *
                                       static_cast<double>(p.reference_length);
        p.base_memory = (40LL << 30) + rng.uniform_int(0, 20LL << 30);
        AnalyticProfiler profiler(p);
        const Tokens l = rng.uniform_int(2048, 24576);
        const int sp = 1 << rng.uniform_int(0, 3);

        int exact = -1;
        for (int c = 0; c <= p.layer_count; ++c) {
            if (profiler.profile_memory(l, RuntimeConfig{sp, c}) >= 0) {
                exact = c;
                break;
            }
        }
        if (exact < 0) continue;
        const int estimated =
            greedy_profile_ckpt(profiler, l, sp, 0, p.layer_count);
        if (std::abs(estimated - exact) > 1) {
            ctx.require(false, "greedy ckpt estimate off by more than one "
                               "layer at trial " + std::to_string(trial));
            return;
        }
    }
}

void criterion_overhead_formula(Context& ctx) {
    const double value = profiling_overhead(3, 3, 3, 5, 1.0);
    ctx.require(value == 60.0, "profiling overhead must be exactly 60x, got " +
                                   std::to_string(value));
    const double scaled = profiling_overhead(3, 3, 3, 5, 2.82);
    ctx.require(scaled == 60.0 * 2.82, "overhead must scale with "
                                       "iteration_time");
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "ABR worked example {1K,1K,1K,1K} vs {2K,2K} = 0.25", 0.001,
         criterion_abr_example},
        {2, "ave_token normalizer is exactly sum(loss)/sum(tokens)", 1.0,
         criterion_stable_normalizer},
        {3, "group auto-selection on measured table -> [16K,128K], SP [1,8]",
         5.0, criterion_group_derivation},
        {4, "hybrid 10k corpus: HBP ABR <= 0.01, naive 128K ABR >= 0.3", 30.0,
         criterion_balance_quality},
        {5, "CR equals the SP token fraction; 0.173 corpus -> 0.173", 30.0,
         criterion_cr_exactness},
        {6, "200 corpora x 6 strategies: conservation/capacity/determinism; "
            "PR after GreedyFill <= 0.01",
         120.0, criterion_packing_validity},
        {7, "sorted batching within 2x of the exhaustive ABR optimum", 60.0,
         criterion_batching_oracle},
        {8, "speedup ordering: naive < hier < hier+balance; random < sorted "
            "< packing",
         60.0, criterion_speedup_ordering},
        {9, "greedy ckpt: worked case 12; linear model within one layer", 1.0,
         criterion_greedy_ckpt},
        {10, "profiling overhead formula: 3x3 lengths/sp + 3 probes @5 iters "
             "= 60x",
         1.0, criterion_overhead_formula},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        Context ctx;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(ctx);
        } catch (const std::exception& e) {
            ctx.failures.push_back(std::string("exception: ") + e.what());
        }
        const auto elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
        if (elapsed > criterion.budget_seconds) {
            ctx.failures.push_back(
                "runtime " + std::to_string(elapsed) + "s exceeds budget " +
                std::to_string(criterion.budget_seconds) + "s");
        }
        const bool ok = ctx.failures.empty();
        if (!ok) ++failed;
        std::printf("%s  %2d. %s (%.3fs)\n", ok ? "PASS" : "FAIL",
                    criterion.id, criterion.name.c_str(), elapsed);
        for (const auto& f : ctx.failures) {
            std::printf("      - %s\n", f.c_str());
        }
    }
    if (failed > 0) {
        std::printf("%d criterion(s) failed\n", failed);
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
