#include <doctest.h>

#include <sstream>

#include "hbp/ingest.hpp"
#include "helpers.hpp"

using namespace hbp;

TEST_SUITE("ingest") {

TEST_CASE("jsonl maps length fields directly") {
    std::istringstream in("{\"length\":4096}\n{\"length\":131072}\n");
    const auto set = load_lengths(in, CorpusFormat::Jsonl, "mem");
    REQUIRE(set.samples.size() == 2);
    CHECK(set.samples[0].length == 4096);
    CHECK(set.samples[1].length == 131072);
    CHECK(set.samples[0].id == 0);
    CHECK(set.samples[1].id == 1);
}

TEST_CASE("jsonl honours explicit ids and skips blank lines") {
    std::istringstream in("{\"id\":7,\"length\":10}\n\n{\"length\":20}\n");
    const auto set = load_lengths(in, CorpusFormat::Jsonl, "mem");
    REQUIRE(set.samples.size() == 2);
    CHECK(set.samples[0].id == 7);
    CHECK(set.samples[1].id == 1);
}

TEST_CASE("empty file is a validation error") {
    std::istringstream in("");
    CHECK_THROWS_WITH_AS(load_lengths(in, CorpusFormat::Jsonl, "mem"),
                         doctest::Contains("empty corpus"), ValidationError);
}

TEST_CASE("csv length column with surrounding columns") {
    std::istringstream in("name,length,extra\na,1,x\nb,2,y\nc,3,z\n");
    const auto set = load_lengths(in, CorpusFormat::Csv, "mem");
    REQUIRE(set.samples.size() == 3);
    CHECK(set.samples[0].length == 1);
    CHECK(set.samples[1].length == 2);
    CHECK(set.samples[2].length == 3);
    CHECK(set.samples[0].id == 0);
    CHECK(set.samples[2].id == 2);
}

TEST_CASE("csv without a length column fails") {
    std::istringstream in("tokens\n5\n");
    CHECK_THROWS_AS(load_lengths(in, CorpusFormat::Csv, "mem"),
                    ValidationError);
}

TEST_CASE("raw lengths, one integer per line") {
    std::istringstream in("12\n34\n56\n");
    const auto set = load_lengths(in, CorpusFormat::RawLengths, "mem");
    REQUIRE(set.samples.size() == 3);
    CHECK(set.samples[2].length == 56);
}

TEST_CASE("malformed record names the line") {
    std::istringstream in("10\nnonsense\n30\n");
    CHECK_THROWS_WITH_AS(load_lengths(in, CorpusFormat::RawLengths, "mem"),
                         doctest::Contains("line 2"), ValidationError);
}

TEST_CASE("zero or negative lengths are rejected") {
    std::istringstream in("{\"length\":0}\n");
    CHECK_THROWS_AS(load_lengths(in, CorpusFormat::Jsonl, "mem"),
                    ValidationError);
    std::istringstream neg("{\"length\":-3}\n");
    CHECK_THROWS_AS(load_lengths(neg, CorpusFormat::Jsonl, "mem"),
                    ValidationError);
}

TEST_CASE("jsonl round trip preserves id/length pairs") {
    const auto set = test::hybrid_corpus(200, 0.05, 4096, 131072, 42);
    std::ostringstream out;
    write_jsonl(set, out);
    std::istringstream in(out.str());
    const auto reloaded = load_lengths(in, CorpusFormat::Jsonl, "mem");
    REQUIRE(reloaded.samples.size() == set.samples.size());
    for (std::size_t i = 0; i < set.samples.size(); ++i) {
        CHECK(reloaded.samples[i] == set.samples[i]);
    }
}

TEST_CASE("length cap policies") {
    const auto set = test::make_set({10, 200, 30});
    CHECK_THROWS_AS(apply_length_cap(set, 100, OverlongPolicy::Error),
                    ValidationError);
    const auto truncated =
        apply_length_cap(set, 100, OverlongPolicy::TruncateToMax);
    CHECK(truncated.samples[1].length == 100);
    const auto dropped = apply_length_cap(set, 100, OverlongPolicy::Drop);
    REQUIRE(dropped.samples.size() == 2);
    CHECK(dropped.samples[1].length == 30);
}

TEST_CASE("synth: long_fraction 0 draws everything from the short dist") {
    SynthSpec spec;
    spec.count = 10;
    spec.short_dist = parse_distribution("uniform:1:100");
    spec.long_fraction = 0.0;
    spec.long_dist = parse_distribution("uniform:1000:2000");
    spec.max_length = 4096;
    spec.seed = 3;
    const auto set = synth_lengths(spec);
    REQUIRE(set.samples.size() == 10);
    for (const auto& s : set.samples) CHECK(s.length <= 100);
}

TEST_CASE("synth is a pure function of its spec") {
    SynthSpec spec;
    spec.count = 1000;
    spec.short_dist = parse_distribution("lognormal:6.5:0.9");
    spec.long_fraction = 0.02;
    spec.long_dist = parse_distribution("uniform:8192:131072");
    spec.max_length = 131072;
    spec.seed = 7;
    const auto a = synth_lengths(spec);
    const auto b = synth_lengths(spec);
    std::ostringstream ja, jb;
    write_jsonl(a, ja);
    write_jsonl(b, jb);
    CHECK(ja.str() == jb.str());
}

TEST_CASE("synth long-sample count is exact") {
    SynthSpec spec;
    spec.count = 1000;
    spec.short_dist = parse_distribution("uniform:1:4096");
    spec.long_fraction = 0.02;
    spec.long_dist = parse_distribution("uniform:8192:131072");
    spec.max_length = 131072;
    spec.seed = 11;
    const auto set = synth_lengths(spec);
    // disjoint supports: anything beyond the short support is a long draw
    int above = 0;
    for (const auto& s : set.samples) {
        if (s.length > 4096) ++above;
    }
    CHECK(above == 20);
}

TEST_CASE("synth clips to max_length and one token") {
    SynthSpec spec;
    spec.count = 500;
    spec.short_dist = parse_distribution("normal:5:2000");
    spec.long_fraction = 0.5;
    spec.long_dist = parse_distribution("uniform:900:1000");
    spec.max_length = 950;
    spec.seed = 1;
    const auto set = synth_lengths(spec);
    for (const auto& s : set.samples) {
        CHECK(s.length >= 1);
        CHECK(s.length <= 950);
    }
}

TEST_CASE("synth spec parsing") {
    const auto spec = parse_synth_spec(
        "count=100,long_fraction=0.1,short=lognormal:7:0.8,"
        "long=uniform:16385:131072,max=131072",
        9);
    CHECK(spec.count == 100);
    CHECK(spec.long_fraction == doctest::Approx(0.1));
    CHECK(spec.max_length == 131072);
    CHECK(spec.seed == 9);
    CHECK_THROWS_AS(parse_synth_spec("count=10", 0), ValidationError);
    CHECK_THROWS_AS(parse_synth_spec("count=10,short=zipf:1,max=100", 0),
                    ValidationError);
    CHECK_THROWS_AS(
        parse_synth_spec("count=10,short=uniform:1:5,max=100,bogus=1", 0),
        ValidationError);
}

TEST_CASE("invalid distribution parameters fail validation") {
    CHECK_THROWS_AS(parse_distribution("uniform:10:5"), ValidationError);
    CHECK_THROWS_AS(parse_distribution("lognormal:3"), ValidationError);
    CHECK_THROWS_AS(parse_distribution("normal:1:-1"), ValidationError);
}

} // TEST_SUITE
