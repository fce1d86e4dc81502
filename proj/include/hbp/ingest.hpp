#ifndef HBP_INGEST_HPP
#define HBP_INGEST_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hbp/types.hpp"

namespace hbp {

enum class CorpusFormat { Jsonl, Csv, RawLengths };

CorpusFormat parse_corpus_format(const std::string& name);

// Loads a length corpus. Ids are assigned by record index, order preserved.
//   jsonl:       one object per line with integer "length" (optional "id")
//   csv:         header row containing a "length" column
//   raw-lengths: one decimal integer per line
// Malformed records raise ValidationError naming the line; missing files
// raise IoError.
SampleSet load_lengths(const std::filesystem::path& path, CorpusFormat format);
SampleSet load_lengths(std::istream& in, CorpusFormat format,
                       const std::string& source_name);

// Writes one {"id":..,"length":..} object per line.
void write_jsonl(const SampleSet& set, const std::filesystem::path& path);
void write_jsonl(const SampleSet& set, std::ostream& out);

// ---------------------------------------------------------------------------
// Synthetic corpora
// ---------------------------------------------------------------------------

struct LengthDistribution {
    enum class Family { Constant, Uniform, Normal, LogNormal };
    Family family = Family::Constant;
    // constant: a = value
    // uniform: a = low, b = high (inclusive)
    // normal: a = mean, b = stddev
    // lognormal: a = mu, b = sigma of the underlying normal
    double a = 0.0;
    double b = 0.0;

    void validate() const;
};

LengthDistribution parse_distribution(const std::string& text);
std::string format_distribution(const LengthDistribution& d);

// A two-component mixture standing in for hybrid short/long corpora.
struct SynthSpec {
    std::int64_t count = 0;
    LengthDistribution short_dist;
    double long_fraction = 0.0;
    LengthDistribution long_dist;
    Tokens max_length = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Deterministic in SynthSpec. Draws round(count * long_fraction) samples from
// long_dist and the rest from short_dist; every length is clipped to
// [1, max_length].
SampleSet synth_lengths(const SynthSpec& spec);

// Parses the CLI form "count=N,long_fraction=F,short=DIST,long=DIST,
// max=TOKENS" where DIST is family:params, e.g. lognormal:7.0:0.8 or
// uniform:16384:131072.
SynthSpec parse_synth_spec(const std::string& text, std::uint64_t seed);

} // namespace hbp

#endif // HBP_INGEST_HPP
