// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Criteria rest on property suites, oracle equivalence and
// deterministic fixture pipelines rather than any external dataset.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "impeval/analysis.hpp"
#include "impeval/clinical.hpp"
#include "impeval/extraction.hpp"
#include "impeval/fixture.hpp"
#include "impeval/nlg.hpp"
#include "impeval/pipeline.hpp"
#include "impeval/runner.hpp"
#include "impeval/text_norm.hpp"
#include "impeval/utf8.hpp"
#include "oracles.hpp"
#include "stub_endpoint.hpp"
#include "test_support.hpp"

using namespace impeval;
using namespace impeval::test;

namespace {

class Harness {
public:
    void criterion(int number, const std::string& title,
                   const std::function<std::string()>& body) {
        std::string detail;
        bool pass = false;
        try {
            detail = body();
            pass = true;
        } catch (const std::exception& e) {
            detail = e.what();
        }
        std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", number,
                    title.c_str(), detail.empty() ? "" : " — ", detail.c_str());
        std::fflush(stdout);
        if (!pass) {
            ++failures_;
        }
    }

    int failures() const { return failures_; }

private:
    int failures_ = 0;
};

[[noreturn]] void fail(const std::string& message) { throw std::runtime_error(message); }

void require(bool condition, const std::string& message) {
    if (!condition) {
        fail(message);
    }
}

std::string fmt(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.10g", value);
    return buffer;
}

// ---------------------------------------------------------------------------
// criterion 1 + 9a share the seed-7 fixture pipeline
// ---------------------------------------------------------------------------

struct PipelineFiles {
    TempDir dir;
    RunConfig config;
    Corpus corpus;
};

PipelineFiles make_identity_pipeline(std::uint64_t seed, std::size_t n_reports,
                                     std::size_t n_patients) {
    PipelineFiles files;
    const Fixture fixture = generate_fixture(
        FixtureSpec{.seed = seed, .n_reports = n_reports, .n_patients = n_patients});
    write_fixture(fixture, files.dir.path());
    files.corpus = load_corpus(files.dir.file("corpus.jsonl"));

    std::vector<Candidate> candidates;
    for (const Report& report : files.corpus.reports) {
        if (report.split == Split::kTest) {
            Candidate c;
            c.report_id = report.id;
            c.model_name = "identity";
            c.impression = report.impression;
            candidates.push_back(std::move(c));
        }
    }
    save_candidates(candidates, files.dir.file("candidates.jsonl"));

    files.config.corpus_path = files.dir.file("corpus.jsonl");
    files.config.lexicon_paths = {files.dir.file("lexicon.txt")};
    files.config.candidates_path = files.dir.file("candidates.jsonl");
    files.config.out_dir = files.dir.file("out");
    files.config.jobs = 8;
    return files;
}

std::string criterion_identity_pipeline() {
    PipelineFiles files = make_identity_pipeline(7, 5000, 600);
    std::size_t test_count = 0;
    for (const Report& report : files.corpus.reports) {
        test_count += report.split == Split::kTest ? 1 : 0;
    }
    require(test_count == 500, "expected 500 test reports, got " + fmt(double(test_count)));

    const auto started = std::chrono::steady_clock::now();
    const EvaluateSummary summary = run_evaluate(files.config);
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - started)
                               .count();

    require(summary.scored == 500, "scored != 500");
    require(summary.leaderboard.size() == 1, "expected one leaderboard row");
    const LeaderboardRow& row = summary.leaderboard[0];
    require(*row.mean(Metric::kEcr) == 1.0, "ECR mean != 1.0");
    require(*row.mean(Metric::kUer) == 0.0, "UER mean != 0.0");
    require(*row.mean(Metric::kBleu4) == 1.0, "BLEU-4 mean != 1.0");
    require(*row.mean(Metric::kRougeL) == 1.0, "ROUGE-L F mean != 1.0");

    // FCR of candidates equals FCR of the references themselves.
    const Matcher matcher = build_matcher(load_lexicon(files.config.lexicon_paths));
    const Rubric rubric = default_rubric();
    double fcr_sum = 0.0;
    for (const Report& report : files.corpus.reports) {
        if (report.split == Split::kTest) {
            fcr_sum += fcr(report.impression, rubric, matcher).first;
        }
    }
    const double reference_fcr = fcr_sum / 500.0;
    require(std::abs(*row.mean(Metric::kFcr) - reference_fcr) <= 1e-9,
            "FCR mean deviates from reference FCR");
    require(seconds < 5.0, "runtime " + fmt(seconds) + "s >= 5s");
    return "500 test reports, ECR/UER/BLEU/ROUGE exact, " + fmt(seconds) + "s";
}

// ---------------------------------------------------------------------------
// criterion 2: extraction vs brute-force scan
// ---------------------------------------------------------------------------

std::string criterion_extraction_oracle() {
    std::mt19937 rng(20260809);
    const std::u32string alphabet = U"abc肺癌转移结 Ａ1ｘ";
    auto random_u32 = [&](std::size_t min_len, std::size_t max_len) {
        std::u32string s;
        const std::size_t len = min_len + rng() % (max_len - min_len + 1);
        for (std::size_t i = 0; i < len; ++i) {
            s.push_back(alphabet[rng() % alphabet.size()]);
        }
        return s;
    };

    std::size_t mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::pair<std::string, Category>> terms;
        const std::size_t n_terms = 1 + rng() % 50;
        for (std::size_t i = 0; i < n_terms; ++i) {
            terms.emplace_back(utf8::encode(random_u32(1, 4)), Category::kGeneral);
        }
        terms.emplace_back("肺", Category::kAnatomy);
        const std::string text = utf8::encode(random_u32(0, 200));

        const Lexicon lexicon = lexicon_from_terms(terms);
        const Matcher matcher = build_matcher(lexicon);
        std::vector<std::string> normalized_terms;
        for (const LexiconEntry& entry : lexicon.terms) {
            normalized_terms.push_back(entry.term);
        }
        const NormalizedText norm = normalize_with_origin(text);
        const auto expected = oracle_greedy_scan(normalized_terms, norm.text);
        const auto actual = extract_entities(matcher, text);
        bool same = actual.size() == expected.size();
        for (std::size_t i = 0; same && i < actual.size(); ++i) {
            same = actual[i].term == expected[i].term &&
                   actual[i].norm_length == expected[i].norm_len &&
                   actual[i].start == norm.origin[expected[i].norm_pos];
        }
        mismatches += same ? 0 : 1;
    }
    require(mismatches == 0, fmt(double(mismatches)) + " mismatches");
    return "1000 randomized (lexicon, text) pairs, zero mismatches";
}

// ---------------------------------------------------------------------------
// criterion 3: ECR/UER arithmetic
// ---------------------------------------------------------------------------

std::string criterion_set_arithmetic() {
    std::mt19937 rng(311);
    const std::vector<std::string> universe = {"a", "b", "c", "d", "e", "f",
                                               "g", "h", "i", "j"};
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<std::string> ref;
        std::vector<std::string> gen;
        for (const std::string& item : universe) {
            if (rng() % 2) ref.push_back(item);
            if (rng() % 2) gen.push_back(item);
        }
        const EntitySet ref_set(ref.begin(), ref.end());
        const EntitySet gen_set(gen.begin(), gen.end());
        require(ecr(ref_set, gen_set) == oracle_ecr(ref, gen), "ecr mismatch");
        require(uer(ref_set, gen_set) == oracle_uer(ref, gen), "uer mismatch");
    }
    // the four edge conventions
    require(ecr({}, {"x"}) == 1.0, "empty E_ref must give ECR 1");
    require(uer({"x"}, {}) == 0.0, "empty E_gen must give UER 0");
    require(ecr({"x", "y"}, {"x", "y"}) == 1.0 && uer({"x", "y"}, {"x", "y"}) == 0.0,
            "identity must give (1, 0)");
    require(ecr({"x"}, {"y"}) == 0.0 && uer({"x"}, {"y"}) == 1.0,
            "disjoint non-empty must give (0, 1)");
    return "10000 random set pairs exact, all four edge conventions hold";
}

// ---------------------------------------------------------------------------
// criterion 4: FCR battery
// ---------------------------------------------------------------------------

std::string criterion_fcr_battery() {
    const Matcher matcher = build_matcher(lexicon_from_terms({
        {"肺", Category::kAnatomy},
        {"纵隔", Category::kAnatomy},
        {"肝", Category::kAnatomy},
        {"淋巴结", Category::kAnatomy},
        {"肿瘤", Category::kPathology},
        {"结节", Category::kPathology},
        {"代谢", Category::kGeneral},
        {"suv", Category::kGeneral},
    }));
    const Rubric rubric = default_rubric();
    const auto pad = [](std::size_t n) { // neutral filler: no terms, no markers
        std::string s;
        for (std::size_t i = 0; i < n; ++i) {
            s += "的";
        }
        return s;
    };

    struct Case {
        std::string text;
        std::vector<double> expected; // (numbered, anatomy, density, length, boilerplate)
    };
    // Hand-scored against the default rubric. Character counts are code
    // points; density = covered non-whitespace / total non-whitespace.
    const std::vector<Case> battery = {
        // 15 text chars + 50 pad = 65; covered 肺1+肿瘤2+纵隔2+结节2 = 7 -> 7/65
        {"1.肺见肿瘤；2.纵隔见结节；" + pad(50), {1, 1, 0.5, 1, 1}},
        {"", {0, 0, 0, 0, 0}},
        {"   \t ", {0, 0, 0, 0, 0}},
        {pad(70), {0, 0, 0, 1, 1}},
        {pad(25), {0, 0, 0, 0.5, 1}},
        {pad(10), {0, 0, 0, 0, 1}},
        // 8 + 53 = 61 chars; covered 3 -> 0.049
        {"1.肺代谢增高。" + pad(53), {0.5, 0.5, 0, 1, 1}},
        // denylist phrase; 14 + 50 = 64 chars
        {"作为人工智能，无法提供诊断。" + pad(50), {0, 0, 0, 1, 0}},
        // 19 + 2 = 21 chars; covered 13 -> 0.62; 4 distinct anatomy
        {"肺、纵隔、肝、淋巴结、肿瘤、结节、代谢" + pad(2), {0, 1, 1, 0.5, 1}},
        // circled markers x3; 23 + 42 = 65 chars; covered 10 -> 0.154
        {"①肺部肿瘤；②纵隔结节；③肝区伴代谢增高表现；" + pad(42), {1, 1, 0.5, 1, 1}},
        // 9 + 1500 = 1509 chars > 1500
        {"1.肺；2.纵隔；" + pad(1500), {1, 1, 0, 0, 1}},
        // paren markers; 21 + 41 = 62 chars; covered 8 -> 0.129
        {"(1)肺肿瘤显著；(2)肝结节伴代谢增高；" + pad(41), {1, 1, 0.5, 1, 1}},
        // 16 chars, all covered
        {"肺纵隔肝淋巴结肿瘤结节代谢suv", {0, 1, 1, 0, 1}},
        // one pause marker, one anatomy, English boilerplate; 30 + 35 = 65
        {"1、纵隔异常，as an AI assistant note" + pad(35), {0.5, 0.5, 0, 1, 0}},
        // 20 + 44 = 64 chars; covered 7 -> 0.109; denylist 很抱歉
        {"1.肺肿瘤；2.纵隔结节；很抱歉仅供参考" + pad(44), {1, 1, 0.5, 1, 0}},
        // 13 + 800 = 813 chars in the partial band
        {"1.肺肿瘤。2.纵隔结节。" + pad(800), {1, 1, 0, 0.5, 1}},
        // markers only; 14 + 50 = 64 chars
        {"1.的的；2.的的；3.的的" + pad(50), {1, 0, 0, 1, 1}},
        // 15 chars, 12 non-ws all covered
        {"suv suv suv suv", {0, 0, 1, 0, 1}},
        // 50 chars, 41 non-ws, covered 6 -> 0.146
        {"1. suv is elevated today; 2. suv is elevated again", {1, 0, 0.5, 0.5, 1}},
        // 25 + 30 = 55 chars; covered 13 -> 0.236
        {"1.肺肿瘤，代谢增高；2.纵隔、肝、淋巴结均见结节" + pad(30), {1, 1, 0.5, 0.5, 1}},
    };
    require(battery.size() == 20, "battery must have 20 cases");

    for (std::size_t i = 0; i < battery.size(); ++i) {
        const auto& c = battery[i];
        const auto [mean, scores] = fcr(c.text, rubric, matcher);
        require(scores.size() == 5, "criterion vector must have 5 entries");
        for (std::size_t k = 0; k < 5; ++k) {
            require(scores[k] == c.expected[k],
                    "case " + fmt(double(i + 1)) + " criterion " + fmt(double(k + 1)) +
                        ": got " + fmt(scores[k]) + ", want " + fmt(c.expected[k]));
        }
        double sum = 0;
        for (double v : c.expected) {
            sum += v;
        }
        require(mean == sum / 5.0, "case " + fmt(double(i + 1)) + " mean mismatch");
        // multiples of 0.1 under N = 5
        require(std::abs(mean * 10.0 - std::round(mean * 10.0)) < 1e-9,
                "mean not a multiple of 0.1");
    }
    return "20 crafted strings score exactly as hand-assigned";
}

// ---------------------------------------------------------------------------
// criterion 5: NLG metric spot values + LCS oracle
// ---------------------------------------------------------------------------

std::string criterion_nlg_values() {
    const auto seq = [](std::vector<std::string> tokens) {
        TokenSequence s;
        s.tokens = std::move(tokens);
        return s;
    };

    const double bp_case = bleu(seq({"a", "b", "c", "d"}), seq({"a", "b", "c", "d", "e", "f"}));
    require(std::abs(bp_case - 0.60653) <= 1e-5,
            "BLEU brevity penalty case: " + fmt(bp_case));

    const RougeScore rouge = rouge_l(seq({"a", "c", "e"}), seq({"a", "b", "c", "d", "e"}));
    require(rouge.precision == 1.0 && rouge.recall == 0.6 && rouge.f == 0.75,
            "ROUGE-L hand case mismatch");

    require(meteor_lite(seq({"a", "b", "c", "d"}), seq({"a", "b", "c", "d"})) == 0.9921875,
            "METEOR identity case mismatch");
    require(meteor_lite(seq({"a", "b"}), seq({"b", "a"})) == 0.5,
            "METEOR fragmentation case mismatch");

    // LCS DP vs exponential enumeration over the 3-symbol alphabet:
    // exhaustive for all pairs of lengths <= 4, sampled for lengths 5..8.
    const std::vector<std::string> alphabet = {"x", "y", "z"};
    std::vector<std::vector<std::string>> short_seqs;
    short_seqs.push_back({});
    for (std::size_t len = 1; len <= 4; ++len) {
        std::size_t count = 1;
        for (std::size_t i = 0; i < len; ++i) {
            count *= 3;
        }
        for (std::size_t code = 0; code < count; ++code) {
            std::vector<std::string> s;
            std::size_t v = code;
            for (std::size_t i = 0; i < len; ++i) {
                s.push_back(alphabet[v % 3]);
                v /= 3;
            }
            short_seqs.push_back(std::move(s));
        }
    }
    for (const auto& a : short_seqs) {
        for (const auto& b : short_seqs) {
            if (lcs_length(a, b) != oracle_lcs(a, b)) {
                fail("LCS mismatch on exhaustive short pair");
            }
        }
    }
    std::mt19937 rng(515);
    for (int trial = 0; trial < 10000; ++trial) {
        std::vector<std::string> a, b;
        for (std::size_t i = 0, n = 5 + rng() % 4; i < n; ++i) {
            a.push_back(alphabet[rng() % 3]);
        }
        for (std::size_t i = 0, n = 5 + rng() % 4; i < n; ++i) {
            b.push_back(alphabet[rng() % 3]);
        }
        if (lcs_length(a, b) != oracle_lcs(a, b)) {
            fail("LCS mismatch on sampled pair");
        }
    }
    return "spot values exact; LCS oracle clean on " +
           fmt(double(short_seqs.size() * short_seqs.size())) + " exhaustive + 10000 sampled pairs";
}

// ---------------------------------------------------------------------------
// criterion 6: statistics
// ---------------------------------------------------------------------------

std::string criterion_statistics() {
    std::mt19937 rng(616);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x, y;
        for (int i = 0; i < 50; ++i) {
            x.push_back(static_cast<double>(rng() % 100000) / 1000.0);
            y.push_back(static_cast<double>(rng() % 100000) / 1000.0);
        }
        require(std::abs(pearson(x, y) - oracle_pearson(x, y)) <= 1e-9,
                "pearson deviates from direct formula");
    }
    for (int trial = 0; trial < 100; ++trial) {
        const double a = 0.25 + static_cast<double>(rng() % 400) / 100.0;
        const double b = static_cast<double>(rng() % 200) - 100.0;
        std::vector<double> x, pos, neg;
        for (int i = 0; i < 30; ++i) {
            const double v = static_cast<double>(rng() % 5000) / 50.0 + i;
            x.push_back(v);
            pos.push_back(a * v + b);
            neg.push_back(-a * v + b);
        }
        require(std::abs(pearson(x, pos) - 1.0) <= 1e-12, "affine +1 not exact");
        require(std::abs(pearson(x, neg) + 1.0) <= 1e-12, "affine -1 not exact");
    }
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> values;
        const std::size_t n = 1 + rng() % 200;
        for (std::size_t i = 0; i < n; ++i) {
            values.push_back(static_cast<double>(rng() % 10000) / 100.0);
        }
        const Quartiles q = quartiles(values);
        require(q.min <= q.q1 && q.q1 <= q.median && q.median <= q.q3 && q.q3 <= q.max,
                "quartile ordering violated");
    }
    // quartile spot check (median-of-halves)
    const Quartiles q = quartiles({1, 2, 3, 4, 5});
    require(q.q1 == 1.5 && q.median == 3.0 && q.q3 == 4.5, "median-of-halves mismatch");

    // correlation matrices: symmetric, unit diagonal
    std::vector<SampleScore> scores;
    for (int i = 0; i < 200; ++i) {
        SampleScore s;
        s.report_id = "r" + std::to_string(i);
        s.model_name = i % 3 == 0 ? "m1" : (i % 3 == 1 ? "m2" : "m3");
        s.tracer = "FDG";
        s.bleu4 = static_cast<double>(rng() % 1000) / 999.0;
        s.rouge_l_f = static_cast<double>(rng() % 1000) / 999.0;
        s.meteor = static_cast<double>(rng() % 1000) / 999.0;
        s.ecr = static_cast<double>(rng() % 1000) / 999.0;
        s.uer = static_cast<double>(rng() % 1000) / 999.0;
        s.fcr = static_cast<double>(rng() % 11) / 10.0;
        scores.push_back(std::move(s));
    }
    const std::vector<Metric> metrics(kAllMetrics.begin(), kAllMetrics.end());
    for (const CorrelationLevel level :
         {CorrelationLevel::kSample, CorrelationLevel::kModel}) {
        const CorrelationMatrix matrix = correlation_matrix(scores, metrics, level);
        for (std::size_t i = 0; i < metrics.size(); ++i) {
            for (std::size_t j = 0; j < metrics.size(); ++j) {
                const auto& a = matrix.cells[i][j];
                const auto& b = matrix.cells[j][i];
                require(a.has_value() == b.has_value(), "correlation matrix asymmetric");
                if (a && b) {
                    require(*a == *b, "correlation matrix asymmetric values");
                }
            }
            if (matrix.cells[i][i]) {
                require(*matrix.cells[i][i] == 1.0, "diagonal not 1");
            }
        }
    }
    return "pearson oracle 1e-9, affine 1e-12, 1000 quartile orderings, matrices symmetric";
}

// ---------------------------------------------------------------------------
// criterion 7: ECR x FCR corner combinations
// ---------------------------------------------------------------------------

std::string criterion_orthogonality() {
    const Matcher matcher = build_matcher(lexicon_from_terms({
        {"肺", Category::kAnatomy},
        {"纵隔", Category::kAnatomy},
        {"肝", Category::kAnatomy},
        {"淋巴结", Category::kAnatomy},
        {"肿瘤", Category::kPathology},
        {"结节", Category::kPathology},
        {"代谢", Category::kGeneral},
        {"suv", Category::kGeneral},
    }));
    const Rubric rubric = default_rubric();

    // References with no anatomy entities, so a candidate can cover them
    // while scoring zero on the anatomical criterion.
    const std::string reference = "肿瘤、结节、代谢";
    const EntitySet e_ref = extract_entity_set(matcher, reference);
    require(e_ref == EntitySet{"肿瘤", "结节", "代谢"}, "reference entity set unexpected");

    std::string padding;
    for (int i = 0; i < 1600; ++i) {
        padding += "的";
    }

    const auto corner = [&](const std::string& candidate) {
        const EntitySet e_gen = extract_entity_set(matcher, candidate);
        return std::make_pair(ecr(e_ref, e_gen), fcr(candidate, rubric, matcher).first);
    };

    // (ECR 1, FCR 1): covers everything, well formed.
    std::string good = "1.肺见肿瘤，代谢增高；2.纵隔见淋巴结结节；";
    good += "3.肝区肿瘤伴代谢增高；4.肺结节、suv升高明显。";
    good += "5.其余区域代谢正常。6.建议随访。";
    const auto [ecr_11, fcr_11] = corner(good);
    require(ecr_11 == 1.0, "corner (1,1): ECR " + fmt(ecr_11));
    require(fcr_11 == 1.0, "corner (1,1): FCR " + fmt(fcr_11));

    // (ECR 1, FCR 0): covers everything, structurally hopeless.
    const auto [ecr_10, fcr_10] =
        corner("肿瘤结节代谢作为人工智能" + padding);
    require(ecr_10 == 1.0, "corner (1,0): ECR " + fmt(ecr_10));
    require(fcr_10 == 0.0, "corner (1,0): FCR " + fmt(fcr_10));

    // (ECR 0, FCR 1): covers nothing, perfectly formed.
    std::string formed = "1.肺与纵隔可见异常，suv升高；2.肝及淋巴结显示异常，suv波动；";
    formed += "3.肺、肝另见异常；4.suv复查随访。5.其余未见异常改变。";
    const auto [ecr_01, fcr_01] = corner(formed);
    require(ecr_01 == 0.0, "corner (0,1): ECR " + fmt(ecr_01));
    require(fcr_01 == 1.0, "corner (0,1): FCR " + fmt(fcr_01));

    // (ECR 0, FCR 0): covers nothing, structurally hopeless.
    const auto [ecr_00, fcr_00] = corner("作为人工智能" + padding);
    require(ecr_00 == 0.0, "corner (0,0): ECR " + fmt(ecr_00));
    require(fcr_00 == 0.0, "corner (0,0): FCR " + fmt(fcr_00));

    return "all four (ECR, FCR) corners realized";
}

// ---------------------------------------------------------------------------
// criterion 8: split integrity
// ---------------------------------------------------------------------------

std::string criterion_split_integrity() {
    Corpus leaky;
    leaky.reports.push_back(Report{"r1", "patientA", "FDG", "f", "i", Split::kTrain});
    leaky.reports.push_back(Report{"r2", "patientB", "FDG", "f", "i", Split::kTrain});
    leaky.reports.push_back(Report{"r3", "patientA", "FDG", "f", "i", Split::kTest});
    leaky.reports.push_back(Report{"r4", "patientC", "FDG", "f", "i", Split::kValidation});
    const SplitReport flagged = validate_split(leaky);
    require(flagged.violations.size() == 1, "expected exactly one violation");
    require(flagged.violations[0] == "patientA", "wrong patient flagged");

    const Fixture clean =
        generate_fixture(FixtureSpec{.seed = 7, .n_reports = 500, .n_patients = 60});
    const SplitReport ok = validate_split(clean.corpus);
    require(ok.clean(), "clean fixture reported violations");
    require(ok.train + ok.validation + ok.test == 500, "fixture counts wrong");
    return "leaked patient flagged by id; clean fixture has zero violations";
}

// ---------------------------------------------------------------------------
// criterion 9: determinism & cache
// ---------------------------------------------------------------------------

std::string criterion_determinism() {
    PipelineFiles files = make_identity_pipeline(7, 1200, 150);

    const std::vector<std::string> compared = {
        "scores.jsonl",          "leaderboard.csv",        "distribution.csv",
        "stratified_ecr.csv",    "stratified_uer.csv",     "stratified_fcr.csv",
        "stratified_bleu4.csv",  "correlations_sample.csv", "correlations_model.csv"};

    files.config.jobs = 1;
    files.config.out_dir = files.dir.file("out-j1");
    run_evaluate(files.config);
    files.config.jobs = 8;
    files.config.out_dir = files.dir.file("out-j8");
    run_evaluate(files.config);
    for (const std::string& name : compared) {
        const std::string a = read_text(files.dir.file("out-j1") / name);
        const std::string b = read_text(files.dir.file("out-j8") / name);
        require(!a.empty(), name + " is empty");
        require(a == b, name + " differs between --jobs 1 and --jobs 8");
    }

    // runner cache: second pass issues zero network calls
    StubEndpoint stub(StubEndpoint::fixed_responder("cached impression"));
    Corpus tiny;
    for (int i = 0; i < 6; ++i) {
        tiny.reports.push_back(Report{"t" + std::to_string(i), "p" + std::to_string(i),
                                      "FDG", "findings " + std::to_string(i), "imp",
                                      Split::kTest});
    }
    EndpointConfig endpoint;
    endpoint.model_name = "stub";
    endpoint.base_url = stub.base_url();
    endpoint.max_retries = 1;
    endpoint.parallelism = 2;
    endpoint.timeout_s = 5.0;
    endpoint.initial_backoff_ms = 1;
    TempDir cache;
    const GenerationResult first =
        generate_candidates(tiny, endpoint, "{findings}", cache.path());
    require(first.errors.empty() && first.candidates.size() == 6, "first pass failed");
    const std::size_t calls = stub.hits();
    require(calls == 6, "expected 6 endpoint calls, saw " + fmt(double(calls)));
    const GenerationResult second =
        generate_candidates(tiny, endpoint, "{findings}", cache.path());
    require(second.errors.empty() && second.candidates.size() == 6, "second pass failed");
    require(stub.hits() == calls, "cache miss: second pass hit the network");
    for (const Candidate& candidate : second.candidates) {
        require(candidate.cached, "candidate not marked cached");
        require(candidate.impression == "cached impression", "cache corrupted content");
    }
    return "jobs 1 vs 8 byte-identical; second runner pass fully cached";
}

// ---------------------------------------------------------------------------
// criterion 10: throughput
// ---------------------------------------------------------------------------

std::string criterion_throughput() {
    const Fixture fixture =
        generate_fixture(FixtureSpec{.seed = 100, .n_reports = 10000, .n_patients = 500});
    const Matcher matcher = build_matcher(fixture_lexicon());
    const Rubric rubric = default_rubric();

    // Perturbed candidates over every report (all splits): half of the
    // reference text plus a fabricated clause.
    std::vector<Candidate> candidates;
    candidates.reserve(fixture.corpus.reports.size());
    for (const Report& report : fixture.corpus.reports) {
        Candidate c;
        c.report_id = report.id;
        c.model_name = "perturbed";
        const std::u32string u32 = utf8::decode(report.impression);
        c.impression = utf8::encode(u32.substr(0, u32.size() / 2)) + "，胃壁密度影待诊。";
        candidates.push_back(std::move(c));
    }
    require(candidates.size() == 10000, "expected 10000 samples");

    const auto started = std::chrono::steady_clock::now();
    std::vector<SampleError> errors;
    const std::vector<SampleScore> scores =
        score_all(fixture.corpus, candidates, matcher, rubric, ScoreOptions{}, nullptr,
                  /*jobs=*/1, &errors);
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - started)
                               .count();
    require(errors.empty(), "scoring produced errors");
    require(scores.size() == 10000, "scored count mismatch");
    require(seconds < 60.0, "scoring took " + fmt(seconds) + "s");
    double checksum = 0.0;
    for (const SampleScore& s : scores) {
        checksum += s.ecr + s.bleu4;
    }
    require(checksum > 0.0, "degenerate scores");
    return "10000 samples in " + fmt(seconds) + "s single-threaded";
}

} // namespace

int main() {
    Harness harness;
    harness.criterion(1, "identity pipeline yields perfect leaderboard means",
                      criterion_identity_pipeline);
    harness.criterion(2, "greedy extraction equals the brute-force scan oracle",
                      criterion_extraction_oracle);
    harness.criterion(3, "ECR/UER equal brute-force set arithmetic",
                      criterion_set_arithmetic);
    harness.criterion(4, "FCR battery of 20 crafted strings scores exactly",
                      criterion_fcr_battery);
    harness.criterion(5, "NLG metric spot values and LCS oracle", criterion_nlg_values);
    harness.criterion(6, "pearson/quartile/correlation statistics", criterion_statistics);
    harness.criterion(7, "ECR and FCR reach all four corner combinations",
                      criterion_orthogonality);
    harness.criterion(8, "patient-level split integrity", criterion_split_integrity);
    harness.criterion(9, "byte-identical reruns and warm cache", criterion_determinism);
    harness.criterion(10, "corpus-scale scoring throughput", criterion_throughput);

    if (harness.failures() > 0) {
        std::printf("%d criterion(s) failed\n", harness.failures());
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
