#include "hbp/types.hpp"

#include <algorithm>
#include <unordered_set>

namespace hbp {

void SampleSet::validate() const {
    if (samples.empty()) {
        throw ValidationError("empty corpus: " + source);
    }
    std::unordered_set<SampleId> seen;
    seen.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.length < 1) {
            throw ValidationError("sample " + std::to_string(s.id) +
                                  " has non-positive length " +
                                  std::to_string(s.length));
        }
        if (!seen.insert(s.id).second) {
            throw ValidationError("duplicate sample id " + std::to_string(s.id));
        }
    }
}

SampleSet apply_length_cap(const SampleSet& set, Tokens max_length,
                           OverlongPolicy policy) {
    SampleSet out;
    out.source = set.source;
    out.samples.reserve(set.samples.size());
    for (const auto& s : set.samples) {
        if (s.length <= max_length) {
            out.samples.push_back(s);
            continue;
        }
        switch (policy) {
            case OverlongPolicy::Error:
                throw ValidationError(
                    "sample " + std::to_string(s.id) + " length " +
                    std::to_string(s.length) + " exceeds max packing length " +
                    std::to_string(max_length));
            case OverlongPolicy::TruncateToMax:
                out.samples.push_back(Sample{s.id, max_length});
                break;
            case OverlongPolicy::Drop:
                break;
        }
    }
    return out;
}

CorpusFingerprint fingerprint(const std::vector<Sample>& samples) {
    std::vector<Sample> sorted = samples;
    std::sort(sorted.begin(), sorted.end(),
              [](const Sample& a, const Sample& b) { return a.id < b.id; });
    CorpusFingerprint fp;
    fp.sample_count = static_cast<std::int64_t>(sorted.size());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto& s : sorted) {
        mix(static_cast<std::uint64_t>(s.id));
        mix(static_cast<std::uint64_t>(s.length));
        fp.total_tokens += s.length;
    }
    fp.id_hash = h;
    return fp;
}

} // namespace hbp
