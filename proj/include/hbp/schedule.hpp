#ifndef HBP_SCHEDULE_HPP
#define HBP_SCHEDULE_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "hbp/balance.hpp"
#include "hbp/costmodel.hpp"

namespace hbp {

struct CurriculumSpec {
    int warmup_iterations = 500;
    // Group indices below the cutoff count as "short".
    int short_group_cutoff = 1;
};

// Reorders a plan so the first warmup_iterations steps are drawn (seeded)
// from short groups only and the remainder is a seeded shuffle of what is
// left. Pure permutation of the input iterations. Throws ValidationError
// with both counts when the plan has too few short iterations.
Plan curriculum_order(const Plan& plan, const CurriculumSpec& spec);

struct RuntimeAssignment {
    std::vector<RuntimeConfig> per_iteration;
    int switch_count = 0; // consecutive-iteration config changes
};

RuntimeAssignment assign_runtime(const Plan& plan);

// CSV schedule export: iteration,group,sp,ckpt,phase.
void write_schedule_csv(const Plan& plan, std::ostream& out);

// ---------------------------------------------------------------------------
// Loss normalizers
// ---------------------------------------------------------------------------

enum class LossMode { Sum, SampleMean, TokenMean, AveToken };

LossMode parse_loss_mode(const std::string& name);

struct SampleLoss {
    double loss = 0.0;  // summed loss over the sample's loss tokens
    Tokens tokens = 0;  // loss token count
};

struct LossResult {
    std::vector<double> per_rank;
    double final_loss = 0.0; // mean over ranks
};

// Per-rank loss under the chosen normalizer, then the cross-rank mean.
//   sum:         sum(loss_i)
//   sample_mean: mean(loss_i / T_i)
//   token_mean:  sum(loss_i) / sum(T_i)
//   ave_token:   sum(loss_i) / (B_l * T_ave), T_ave the global mean tokens
// ave_token makes the final loss equal sum(all losses)/sum(all tokens)
// exactly, for any rank partition with a uniform local batch size. Ranks must
// be non-empty and equally sized; token counts must be >= 1.
LossResult normalize_loss(const std::vector<std::vector<SampleLoss>>& ranks,
                          LossMode mode);

} // namespace hbp

#endif // HBP_SCHEDULE_HPP
