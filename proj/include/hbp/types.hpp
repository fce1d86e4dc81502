#ifndef HBP_TYPES_HPP
#define HBP_TYPES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hbp/errors.hpp"

namespace hbp {

using Tokens = std::int64_t;
using SampleId = std::int64_t;

// One training sequence, reduced to the only attribute the planner needs:
// its token count.
struct Sample {
    SampleId id = 0;
    Tokens length = 0;

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct SampleSet {
    std::vector<Sample> samples;
    std::string source;

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }

    Tokens total_tokens() const {
        Tokens t = 0;
        for (const auto& s : samples) t += s.length;
        return t;
    }

    Tokens max_length() const {
        Tokens m = 0;
        for (const auto& s : samples) m = s.length > m ? s.length : m;
        return m;
    }

    // Enforces length >= 1 and unique ids. Throws ValidationError.
    void validate() const;
};

// Policy for samples longer than the largest packing length.
enum class OverlongPolicy { Error, TruncateToMax, Drop };

// Applies `policy` to samples whose length exceeds `max_length`.
SampleSet apply_length_cap(const SampleSet& set, Tokens max_length,
                           OverlongPolicy policy);

// Fingerprint used to detect that two plans/reports describe the same corpus.
struct CorpusFingerprint {
    std::uint64_t id_hash = 0;
    std::int64_t sample_count = 0;
    Tokens total_tokens = 0;

    friend bool operator==(const CorpusFingerprint&,
                           const CorpusFingerprint&) = default;
};

CorpusFingerprint fingerprint(const std::vector<Sample>& samples);

} // namespace hbp

#endif // HBP_TYPES_HPP
