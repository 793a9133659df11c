#include <doctest.h>

#include <set>

#include "impeval/errors.hpp"
#include "impeval/extraction.hpp"
#include "impeval/fixture.hpp"
#include "impeval/utf8.hpp"
#include "test_support.hpp"

using namespace impeval;
using namespace impeval::test;

TEST_CASE("fixture generation is deterministic") {
    const FixtureSpec spec{.seed = 7, .n_reports = 10, .n_patients = 4};
    const Fixture a = generate_fixture(spec);
    const Fixture b = generate_fixture(spec);
    REQUIRE(a.corpus.reports.size() == 10); // requested count honored
    REQUIRE(a.sidecar.size() == 10);
    REQUIRE(a.corpus.reports.size() == b.corpus.reports.size());
    for (std::size_t i = 0; i < a.corpus.reports.size(); ++i) {
        CHECK(report_to_json_line(a.corpus.reports[i]) ==
              report_to_json_line(b.corpus.reports[i]));
        CHECK(a.sidecar[i].findings_entities == b.sidecar[i].findings_entities);
        CHECK(a.sidecar[i].impression_entities == b.sidecar[i].impression_entities);
    }
}

TEST_CASE("tracer mix fractions are honored") {
    FixtureSpec spec{.seed = 5, .n_reports = 1000, .n_patients = 50};
    spec.tracer_mix = {{"FDG", 9.0}, {"tau", 1.0}};
    const Fixture fixture = generate_fixture(spec);
    REQUIRE(fixture.corpus.reports.size() == 1000);
    std::size_t fdg = 0;
    for (const Report& report : fixture.corpus.reports) {
        fdg += report.tracer == "FDG" ? 1 : 0;
    }
    const double fraction = static_cast<double>(fdg) / 1000.0;
    CHECK(fraction > 0.85);
    CHECK(fraction < 0.95);
}

TEST_CASE("single patient collapses to one split") {
    const Fixture fixture =
        generate_fixture(FixtureSpec{.seed = 1, .n_reports = 12, .n_patients = 1});
    std::set<Split> splits;
    for (const Report& report : fixture.corpus.reports) {
        splits.insert(report.split);
    }
    CHECK(splits.size() == 1);
    CHECK(validate_split(fixture.corpus).clean());
}

TEST_CASE("bad arguments are rejected") {
    CHECK_THROWS_AS(generate_fixture(FixtureSpec{.seed = 1, .n_reports = 5, .n_patients = 0}),
                    ArgumentError);
    FixtureSpec zero_weight{.seed = 1, .n_reports = 5, .n_patients = 2};
    zero_weight.tracer_mix = {{"FDG", 0.0}};
    CHECK_THROWS_AS(generate_fixture(zero_weight), ArgumentError);
    FixtureSpec negative{.seed = 1, .n_reports = 5, .n_patients = 2};
    negative.tracer_mix = {{"FDG", -1.0}};
    CHECK_THROWS_AS(generate_fixture(negative), ArgumentError);
}

TEST_CASE("lengths track the corpus profile") {
    const Fixture fixture =
        generate_fixture(FixtureSpec{.seed = 42, .n_reports = 300, .n_patients = 40});
    double findings_total = 0;
    double impression_total = 0;
    for (const Report& report : fixture.corpus.reports) {
        findings_total += static_cast<double>(utf8::length(report.findings));
        impression_total += static_cast<double>(utf8::length(report.impression));
    }
    const double findings_mean = findings_total / 300.0;
    const double impression_mean = impression_total / 300.0;
    CHECK(findings_mean > 700.0);
    CHECK(findings_mean < 1050.0);
    CHECK(impression_mean > 170.0);
    CHECK(impression_mean < 330.0);
}

TEST_CASE("sidecar ground truth equals extraction output") {
    // This pins the generator/lexicon contract: planted terms are exactly
    // what greedy extraction recovers, on both sides of every report.
    const Fixture fixture =
        generate_fixture(FixtureSpec{.seed = 99, .n_reports = 120, .n_patients = 15});
    const Matcher matcher = build_matcher(fixture_lexicon());
    for (std::size_t i = 0; i < fixture.corpus.reports.size(); ++i) {
        const Report& report = fixture.corpus.reports[i];
        const SidecarEntry& truth = fixture.sidecar[i];
        const EntitySet found_findings = extract_entity_set(matcher, report.findings);
        const EntitySet found_impression = extract_entity_set(matcher, report.impression);
        CHECK(found_findings ==
              EntitySet(truth.findings_entities.begin(), truth.findings_entities.end()));
        CHECK(found_impression == EntitySet(truth.impression_entities.begin(),
                                            truth.impression_entities.end()));
    }
}

TEST_CASE("impression entities are a subset of findings entities") {
    const Fixture fixture =
        generate_fixture(FixtureSpec{.seed = 31, .n_reports = 80, .n_patients = 10});
    for (const SidecarEntry& entry : fixture.sidecar) {
        const std::set<std::string> findings(entry.findings_entities.begin(),
                                             entry.findings_entities.end());
        for (const std::string& term : entry.impression_entities) {
            CHECK(findings.count(term) == 1);
        }
        CHECK_FALSE(entry.impression_entities.empty());
    }
}

TEST_CASE("written fixture files join on id") {
    const Fixture fixture =
        generate_fixture(FixtureSpec{.seed = 2, .n_reports = 25, .n_patients = 6});
    TempDir dir;
    write_fixture(fixture, dir.path());
    const Corpus corpus = load_corpus(dir.file("corpus.jsonl"));
    const auto sidecar = load_sidecar(dir.file("sidecar.jsonl"));
    REQUIRE(corpus.reports.size() == sidecar.size());
    for (std::size_t i = 0; i < sidecar.size(); ++i) {
        CHECK(corpus.reports[i].id == sidecar[i].id);
    }
    // The shipped lexicon must load and cover the planted vocabulary.
    const Lexicon lexicon = load_lexicon({dir.file("lexicon.txt")});
    CHECK(lexicon.size() == fixture_lexicon().size());
}
