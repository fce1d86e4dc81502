#include "hbp/schedule.hpp"

#include <algorithm>
#include <ostream>

#include "hbp/rng.hpp"

namespace hbp {

Plan curriculum_order(const Plan& plan, const CurriculumSpec& spec) {
    if (spec.warmup_iterations < 0) {
        throw ValidationError("warmup_iterations must be >= 0");
    }
    if (spec.short_group_cutoff < 1 ||
        spec.short_group_cutoff >
            static_cast<int>(plan.groups.groups.size())) {
        throw ValidationError("short_group_cutoff must select at least one "
                              "group and at most all of them");
    }

    std::vector<std::size_t> short_idx;
    std::vector<std::size_t> long_idx;
    for (std::size_t i = 0; i < plan.iterations.size(); ++i) {
        if (plan.iterations[i].group_index < spec.short_group_cutoff) {
            short_idx.push_back(i);
        } else {
            long_idx.push_back(i);
        }
    }
    const auto warmup = static_cast<std::size_t>(spec.warmup_iterations);
    if (short_idx.size() < warmup) {
        throw ValidationError(
            "curriculum needs " + std::to_string(warmup) +
            " short-group iterations but the plan has only " +
            std::to_string(short_idx.size()));
    }

    Rng rng(derive_seed(plan.seed, "curriculum"));
    rng.shuffle(short_idx);
    std::vector<std::size_t> warmup_part(short_idx.begin(),
                                         short_idx.begin() +
                                             static_cast<std::ptrdiff_t>(warmup));
    std::vector<std::size_t> rest(short_idx.begin() +
                                      static_cast<std::ptrdiff_t>(warmup),
                                  short_idx.end());
    rest.insert(rest.end(), long_idx.begin(), long_idx.end());
    rng.shuffle(rest);

    Plan out;
    out.groups = plan.groups;
    out.device_count = plan.device_count;
    out.seed = plan.seed;
    out.iterations.reserve(plan.iterations.size());
    for (const auto i : warmup_part) {
        Iteration it = plan.iterations[i];
        it.phase = Phase::Warmup;
        out.iterations.push_back(std::move(it));
    }
    for (const auto i : rest) {
        Iteration it = plan.iterations[i];
        it.phase = Phase::Hybrid;
        out.iterations.push_back(std::move(it));
    }
    return out;
}

RuntimeAssignment assign_runtime(const Plan& plan) {
    RuntimeAssignment out;
    out.per_iteration.reserve(plan.iterations.size());
    for (const auto& it : plan.iterations) {
        out.per_iteration.push_back(plan.group_of(it).config);
    }
    for (std::size_t i = 1; i < out.per_iteration.size(); ++i) {
        if (!(out.per_iteration[i] == out.per_iteration[i - 1])) {
            ++out.switch_count;
        }
    }
    return out;
}

void write_schedule_csv(const Plan& plan, std::ostream& out) {
    out << "iteration,group,sp,ckpt,phase\n";
    for (std::size_t i = 0; i < plan.iterations.size(); ++i) {
        const auto& it = plan.iterations[i];
        const auto& cfg = plan.group_of(it).config;
        out << i << ',' << it.group_index << ',' << cfg.sp << ',' << cfg.ckpt
            << ',' << (it.phase == Phase::Warmup ? "warmup" : "hybrid")
            << '\n';
    }
}

LossMode parse_loss_mode(const std::string& name) {
    if (name == "sum") return LossMode::Sum;
    if (name == "sample_mean" || name == "sample-mean") {
        return LossMode::SampleMean;
    }
    if (name == "token_mean" || name == "token-mean") {
        return LossMode::TokenMean;
    }
    if (name == "ave_token" || name == "ave-token") return LossMode::AveToken;
    throw ValidationError("unknown loss mode: " + name);
}

LossResult normalize_loss(const std::vector<std::vector<SampleLoss>>& ranks,
                          LossMode mode) {
    if (ranks.empty()) throw ValidationError("normalize_loss: no ranks");
    const std::size_t local_batch = ranks.front().size();
    if (local_batch == 0) {
        throw ValidationError("normalize_loss: empty rank");
    }
    double total_tokens = 0.0;
    std::size_t total_samples = 0;
    for (const auto& rank : ranks) {
        if (rank.size() != local_batch) {
            throw ValidationError(
                "normalize_loss: ranks must share one local batch size");
        }
        for (const auto& s : rank) {
            if (s.tokens < 1) {
                throw ValidationError("normalize_loss: token counts must be >= 1");
            }
            total_tokens += static_cast<double>(s.tokens);
            ++total_samples;
        }
    }
    // global mean loss-token count over the whole batch
    const double t_ave = total_tokens / static_cast<double>(total_samples);

    LossResult out;
    out.per_rank.reserve(ranks.size());
    for (const auto& rank : ranks) {
        double loss_sum = 0.0;
        double token_sum = 0.0;
        double per_sample = 0.0;
        for (const auto& s : rank) {
            loss_sum += s.loss;
            token_sum += static_cast<double>(s.tokens);
            per_sample += s.loss / static_cast<double>(s.tokens);
        }
        double value = 0.0;
        switch (mode) {
            case LossMode::Sum:
                value = loss_sum;
                break;
            case LossMode::SampleMean:
                value = per_sample / static_cast<double>(rank.size());
                break;
            case LossMode::TokenMean:
                value = loss_sum / token_sum;
                break;
            case LossMode::AveToken:
                value = loss_sum /
                        (static_cast<double>(rank.size()) * t_ave);
                break;
        }
        out.per_rank.push_back(value);
    }
    double sum = 0.0;
    for (const double v : out.per_rank) sum += v;
    out.final_loss = sum / static_cast<double>(out.per_rank.size());
    return out;
}

} // namespace hbp
