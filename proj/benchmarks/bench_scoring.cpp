#include <benchmark/benchmark.h>

#include "impeval/analysis.hpp"
#include "impeval/fixture.hpp"
#include "impeval/nlg.hpp"
#include "impeval/pipeline.hpp"
#include "impeval/utf8.hpp"

using namespace impeval;

namespace {

struct BenchData {
    Fixture fixture;
    Matcher matcher;
    Rubric rubric;
    std::vector<Candidate> candidates;

    BenchData()
        : fixture(generate_fixture(FixtureSpec{.seed = 7, .n_reports = 256,
                                               .n_patients = 32})),
          matcher(build_matcher(fixture_lexicon())),
          rubric(default_rubric()) {
        for (const Report& report : fixture.corpus.reports) {
            Candidate c;
            c.report_id = report.id;
            c.model_name = "bench";
            const std::u32string u32 = utf8::decode(report.impression);
            c.impression = utf8::encode(u32.substr(0, u32.size() / 2));
            candidates.push_back(std::move(c));
        }
    }
};

const BenchData& data() {
    static BenchData instance;
    return instance;
}

void BM_ExtractEntities(benchmark::State& state) {
    const auto& d = data();
    std::size_t i = 0;
    for (auto _ : state) {
        const Report& report = d.fixture.corpus.reports[i++ % d.fixture.corpus.reports.size()];
        benchmark::DoNotOptimize(extract_entities(d.matcher, report.findings));
    }
}
BENCHMARK(BM_ExtractEntities);

void BM_Fcr(benchmark::State& state) {
    const auto& d = data();
    std::size_t i = 0;
    for (auto _ : state) {
        const Report& report = d.fixture.corpus.reports[i++ % d.fixture.corpus.reports.size()];
        benchmark::DoNotOptimize(fcr(report.impression, d.rubric, d.matcher));
    }
}
BENCHMARK(BM_Fcr);

void BM_Bleu(benchmark::State& state) {
    const auto& d = data();
    const TokenSequence ref =
        tokenize(d.fixture.corpus.reports[0].impression, TokenScheme::kCharacter);
    const TokenSequence cand = tokenize(d.candidates[0].impression, TokenScheme::kCharacter);
    for (auto _ : state) {
        benchmark::DoNotOptimize(bleu(cand, ref));
    }
}
BENCHMARK(BM_Bleu);

void BM_RougeL(benchmark::State& state) {
    const auto& d = data();
    const TokenSequence ref =
        tokenize(d.fixture.corpus.reports[0].impression, TokenScheme::kCharacter);
    const TokenSequence cand = tokenize(d.candidates[0].impression, TokenScheme::kCharacter);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rouge_l(cand, ref));
    }
}
BENCHMARK(BM_RougeL);

void BM_Meteor(benchmark::State& state) {
    const auto& d = data();
    const TokenSequence ref =
        tokenize(d.fixture.corpus.reports[0].impression, TokenScheme::kCharacter);
    const TokenSequence cand = tokenize(d.candidates[0].impression, TokenScheme::kCharacter);
    for (auto _ : state) {
        benchmark::DoNotOptimize(meteor_lite(cand, ref));
    }
}
BENCHMARK(BM_Meteor);

void BM_ScoreSample(benchmark::State& state) {
    const auto& d = data();
    std::size_t i = 0;
    for (auto _ : state) {
        const std::size_t k = i++ % d.candidates.size();
        benchmark::DoNotOptimize(score_sample(d.fixture.corpus.reports[k], d.candidates[k],
                                              d.matcher, d.rubric, ScoreOptions{}));
    }
}
BENCHMARK(BM_ScoreSample);

} // namespace

BENCHMARK_MAIN();
