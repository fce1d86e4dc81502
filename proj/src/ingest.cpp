#include "hbp/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hbp/rng.hpp"

namespace hbp {

namespace {

using nlohmann::json;

Tokens parse_length_value(const std::string& text, std::size_t line_no) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &pos);
    } catch (const std::exception&) {
        throw ValidationError("line " + std::to_string(line_no) +
                              ": not an integer length: '" + text + "'");
    }
    if (pos != text.size()) {
        throw ValidationError("line " + std::to_string(line_no) +
                              ": trailing garbage after length: '" + text + "'");
    }
    return v;
}

void check_positive(Tokens length, std::size_t line_no) {
    if (length < 1) {
        throw ValidationError("line " + std::to_string(line_no) +
                              ": length must be >= 1, got " +
                              std::to_string(length));
    }
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        // trim surrounding whitespace
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? ""
                                               : cell.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

SampleSet load_jsonl(std::istream& in, const std::string& source) {
    SampleSet set;
    set.source = source;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": invalid JSON: " + e.what());
        }
        if (!obj.is_object() || !obj.contains("length") ||
            !obj["length"].is_number_integer()) {
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": expected object with integer \"length\"");
        }
        Sample s;
        s.length = obj["length"].get<Tokens>();
        check_positive(s.length, line_no);
        s.id = obj.contains("id") && obj["id"].is_number_integer()
                   ? obj["id"].get<SampleId>()
                   : static_cast<SampleId>(set.samples.size());
        set.samples.push_back(s);
    }
    return set;
}

SampleSet load_csv(std::istream& in, const std::string& source) {
    SampleSet set;
    set.source = source;
    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError("empty corpus: " + source);
    }
    const auto header = split_csv_row(line);
    const auto col = std::find(header.begin(), header.end(), "length");
    if (col == header.end()) {
        throw ValidationError("csv header has no \"length\" column: " + source);
    }
    const auto length_idx =
        static_cast<std::size_t>(col - header.begin());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv_row(line);
        if (cells.size() <= length_idx) {
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": too few columns");
        }
        Sample s;
        s.length = parse_length_value(cells[length_idx], line_no);
        check_positive(s.length, line_no);
        s.id = static_cast<SampleId>(set.samples.size());
        set.samples.push_back(s);
    }
    return set;
}

SampleSet load_raw(std::istream& in, const std::string& source) {
    SampleSet set;
    set.source = source;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        Sample s;
        s.length = parse_length_value(line.substr(b, e - b + 1), line_no);
        check_positive(s.length, line_no);
        s.id = static_cast<SampleId>(set.samples.size());
        set.samples.push_back(s);
    }
    return set;
}

} // namespace

CorpusFormat parse_corpus_format(const std::string& name) {
    if (name == "jsonl") return CorpusFormat::Jsonl;
    if (name == "csv") return CorpusFormat::Csv;
    if (name == "raw-lengths" || name == "raw") return CorpusFormat::RawLengths;
    throw ValidationError("unknown corpus format: " + name);
}

SampleSet load_lengths(std::istream& in, CorpusFormat format,
                       const std::string& source_name) {
    SampleSet set;
    switch (format) {
        case CorpusFormat::Jsonl: set = load_jsonl(in, source_name); break;
        case CorpusFormat::Csv: set = load_csv(in, source_name); break;
        case CorpusFormat::RawLengths: set = load_raw(in, source_name); break;
    }
    if (set.samples.empty()) {
        throw ValidationError("empty corpus: " + source_name);
    }
    set.validate();
    return set;
}

SampleSet load_lengths(const std::filesystem::path& path, CorpusFormat format) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open corpus file: " + path.string());
    }
    return load_lengths(in, format, path.string());
}

void write_jsonl(const SampleSet& set, std::ostream& out) {
    for (const auto& s : set.samples) {
        out << "{\"id\":" << s.id << ",\"length\":" << s.length << "}\n";
    }
}

void write_jsonl(const SampleSet& set, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write corpus file: " + path.string());
    }
    write_jsonl(set, out);
}

// ---------------------------------------------------------------------------
// Synthetic corpora
// ---------------------------------------------------------------------------

void LengthDistribution::validate() const {
    switch (family) {
        case Family::Constant:
            if (a < 1.0) throw ValidationError("constant length must be >= 1");
            break;
        case Family::Uniform:
            if (a < 1.0 || b < a) {
                throw ValidationError("uniform bounds must satisfy 1 <= low <= high");
            }
            break;
        case Family::Normal:
            if (b < 0.0) throw ValidationError("normal stddev must be >= 0");
            break;
        case Family::LogNormal:
            if (b < 0.0) throw ValidationError("lognormal sigma must be >= 0");
            break;
    }
}

LengthDistribution parse_distribution(const std::string& text) {
    LengthDistribution d;
    std::vector<std::string> parts;
    std::string part;
    std::stringstream ss(text);
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.empty()) throw ValidationError("empty distribution spec");
    auto num = [&](std::size_t i) {
        try {
            return std::stod(parts.at(i));
        } catch (const std::exception&) {
            throw ValidationError("bad distribution parameter in '" + text + "'");
        }
    };
    if (parts[0] == "constant") {
        d.family = LengthDistribution::Family::Constant;
        if (parts.size() != 2) throw ValidationError("constant needs 1 parameter");
        d.a = num(1);
    } else if (parts[0] == "uniform") {
        d.family = LengthDistribution::Family::Uniform;
        if (parts.size() != 3) throw ValidationError("uniform needs 2 parameters");
        d.a = num(1);
        d.b = num(2);
    } else if (parts[0] == "normal") {
        d.family = LengthDistribution::Family::Normal;
        if (parts.size() != 3) throw ValidationError("normal needs 2 parameters");
        d.a = num(1);
        d.b = num(2);
    } else if (parts[0] == "lognormal") {
        d.family = LengthDistribution::Family::LogNormal;
        if (parts.size() != 3) throw ValidationError("lognormal needs 2 parameters");
        d.a = num(1);
        d.b = num(2);
    } else {
        throw ValidationError("unknown distribution family: " + parts[0]);
    }
    d.validate();
    return d;
}

std::string format_distribution(const LengthDistribution& d) {
    std::ostringstream os;
    switch (d.family) {
        case LengthDistribution::Family::Constant:
            os << "constant:" << d.a;
            break;
        case LengthDistribution::Family::Uniform:
            os << "uniform:" << d.a << ":" << d.b;
            break;
        case LengthDistribution::Family::Normal:
            os << "normal:" << d.a << ":" << d.b;
            break;
        case LengthDistribution::Family::LogNormal:
            os << "lognormal:" << d.a << ":" << d.b;
            break;
    }
    return os.str();
}

void SynthSpec::validate() const {
    if (count < 1) throw ValidationError("synth count must be >= 1");
    if (long_fraction < 0.0 || long_fraction > 1.0) {
        throw ValidationError("long_fraction must lie in [0, 1]");
    }
    if (max_length < 1) throw ValidationError("max_length must be >= 1");
    short_dist.validate();
    long_dist.validate();
}

namespace {

Tokens draw_length(const LengthDistribution& d, Rng& rng, Tokens max_length) {
    double v = 1.0;
    switch (d.family) {
        case LengthDistribution::Family::Constant:
            v = d.a;
            break;
        case LengthDistribution::Family::Uniform:
            v = static_cast<double>(rng.uniform_int(
                static_cast<std::int64_t>(d.a), static_cast<std::int64_t>(d.b)));
            break;
        case LengthDistribution::Family::Normal:
            v = d.a + d.b * rng.normal();
            break;
        case LengthDistribution::Family::LogNormal:
            v = std::exp(d.a + d.b * rng.normal());
            break;
    }
    auto length = static_cast<Tokens>(std::llround(v));
    if (length < 1) length = 1;
    if (length > max_length) length = max_length;
    return length;
}

} // namespace

SampleSet synth_lengths(const SynthSpec& spec) {
    spec.validate();
    const auto long_count = static_cast<std::int64_t>(
        std::llround(static_cast<double>(spec.count) * spec.long_fraction));
    const auto short_count = spec.count - long_count;

    SampleSet set;
    set.source = "synth(seed=" + std::to_string(spec.seed) + ")";
    set.samples.reserve(static_cast<std::size_t>(spec.count));

    Rng short_rng(derive_seed(spec.seed, "synth-short"));
    Rng long_rng(derive_seed(spec.seed, "synth-long"));
    SampleId next_id = 0;
    for (std::int64_t i = 0; i < short_count; ++i) {
        set.samples.push_back(
            Sample{next_id++, draw_length(spec.short_dist, short_rng,
                                          spec.max_length)});
    }
    for (std::int64_t i = 0; i < long_count; ++i) {
        set.samples.push_back(
            Sample{next_id++, draw_length(spec.long_dist, long_rng,
                                          spec.max_length)});
    }
    set.validate();
    return set;
}

SynthSpec parse_synth_spec(const std::string& text, std::uint64_t seed) {
    SynthSpec spec;
    spec.seed = seed;
    std::string item;
    std::stringstream ss(text);
    bool saw_count = false, saw_short = false, saw_max = false;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("bad synth spec item (want key=value): " + item);
        }
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        try {
            if (key == "count") {
                spec.count = std::stoll(value);
                saw_count = true;
            } else if (key == "long_fraction" || key == "long_frac") {
                spec.long_fraction = std::stod(value);
            } else if (key == "short") {
                spec.short_dist = parse_distribution(value);
                saw_short = true;
            } else if (key == "long") {
                spec.long_dist = parse_distribution(value);
            } else if (key == "max" || key == "max_length") {
                spec.max_length = std::stoll(value);
                saw_max = true;
            } else {
                throw ValidationError("unknown synth spec key: " + key);
            }
        } catch (const ValidationError&) {
            throw;
        } catch (const std::exception&) {
            throw ValidationError("bad synth spec value for " + key + ": " + value);
        }
    }
    if (!saw_count || !saw_short || !saw_max) {
        throw ValidationError(
            "synth spec needs at least count=, short= and max=");
    }
    spec.validate();
    return spec;
}

} // namespace hbp
