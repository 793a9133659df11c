#include <doctest.h>

#include <atomic>
#include <map>
#include <mutex>

#include "impeval/errors.hpp"
#include "impeval/runner.hpp"
#include "stub_endpoint.hpp"
#include "test_support.hpp"

using namespace impeval;
using namespace impeval::test;

namespace {

Corpus tiny_corpus(std::size_t n_test) {
    Corpus corpus;
    corpus.reports.push_back(Report{"train1", "pA", "FDG", "train findings",
                                    "train impression", Split::kTrain});
    for (std::size_t i = 0; i < n_test; ++i) {
        const std::string id = "t" + std::to_string(i + 1);
        corpus.reports.push_back(Report{id, "p" + std::to_string(i), "FDG",
                                        "findings for " + id, "impression " + id,
                                        Split::kTest});
    }
    return corpus;
}

EndpointConfig quick_config(const std::string& base_url) {
    EndpointConfig config;
    config.model_name = "stub-model";
    config.base_url = base_url;
    config.max_retries = 3;
    config.parallelism = 1;
    config.timeout_s = 5.0;
    config.initial_backoff_ms = 1;
    return config;
}

} // namespace

TEST_CASE("render_prompt substitutes exactly once") {
    CHECK(render_prompt("Summarize:\n{findings}", "X") == "Summarize:\nX");
    CHECK_THROWS_AS(render_prompt("no placeholder", "X"), ConfigError);
    CHECK_THROWS_AS(render_prompt("{findings} and {findings}", "X"), ConfigError);
    // single pass: a literal placeholder inside findings survives
    CHECK(render_prompt("P: {findings}", "body with {findings} inside") ==
          "P: body with {findings} inside");
}

TEST_CASE("cache key is a pure function of model and prompt") {
    const std::string key = candidate_cache_key("m", "p");
    CHECK(key == candidate_cache_key("m", "p"));
    CHECK(key != candidate_cache_key("m2", "p"));
    CHECK(key != candidate_cache_key("m", "p2"));
    CHECK(key.size() == 64);
}

TEST_CASE("generation against a fixed stub") {
    StubEndpoint stub(StubEndpoint::fixed_responder("the same answer"));
    const Corpus corpus = tiny_corpus(4);
    TempDir cache;

    const GenerationResult result = generate_candidates(
        corpus, quick_config(stub.base_url()), "Summarize: {findings}", cache.path());
    REQUIRE(result.errors.empty());
    REQUIRE(result.candidates.size() == 4); // test split only
    for (const Candidate& candidate : result.candidates) {
        CHECK(candidate.impression == "the same answer");
        CHECK_FALSE(candidate.cached);
    }
    // output ordered by corpus order
    CHECK(result.candidates[0].report_id == "t1");
    CHECK(result.candidates[3].report_id == "t4");
    // with parallelism 1 the endpoint saw requests in corpus order
    const auto prompts = stub.prompts();
    REQUIRE(prompts.size() == 4);
    CHECK(prompts[0] == "Summarize: findings for t1");
    CHECK(prompts[3] == "Summarize: findings for t4");
}

TEST_CASE("second run is served from cache with zero network calls") {
    StubEndpoint stub;
    const Corpus corpus = tiny_corpus(3);
    TempDir cache;
    const EndpointConfig config = quick_config(stub.base_url());

    const GenerationResult first =
        generate_candidates(corpus, config, "{findings}", cache.path());
    REQUIRE(first.errors.empty());
    const std::size_t calls_after_first = stub.hits();
    CHECK(calls_after_first == 3);

    const GenerationResult second =
        generate_candidates(corpus, config, "{findings}", cache.path());
    REQUIRE(second.errors.empty());
    CHECK(stub.hits() == calls_after_first); // zero new calls
    REQUIRE(second.candidates.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(second.candidates[i].cached);
        CHECK(second.candidates[i].impression == first.candidates[i].impression);
        CHECK(second.candidates[i].report_id == first.candidates[i].report_id);
    }
}

TEST_CASE("transient failures are retried with backoff") {
    // fail the first two attempts of every prompt, then succeed
    std::atomic<int> failures{0};
    std::map<std::string, int> per_prompt;
    std::mutex mutex;
    StubEndpoint stub([&](const std::string& prompt, std::size_t) {
        std::lock_guard<std::mutex> lock(mutex);
        int& count = per_prompt[prompt];
        ++count;
        if (count <= 2) {
            ++failures;
            return std::make_pair(500, std::string("{}"));
        }
        return std::make_pair(200, StubEndpoint::completion_body("recovered"));
    });

    const Corpus corpus = tiny_corpus(1);
    TempDir cache;
    const GenerationResult result =
        generate_candidates(corpus, quick_config(stub.base_url()), "{findings}",
                            cache.path());
    REQUIRE(result.errors.empty());
    REQUIRE(result.candidates.size() == 1);
    CHECK(result.candidates[0].impression == "recovered");
    CHECK(result.candidates[0].retries == 2);
}

TEST_CASE("exhausted retries become per-sample errors and the run continues") {
    StubEndpoint stub([](const std::string& prompt, std::size_t) {
        if (prompt.find("t1") != std::string::npos) {
            return std::make_pair(503, std::string("{}"));
        }
        return std::make_pair(200, StubEndpoint::completion_body("fine"));
    });

    const Corpus corpus = tiny_corpus(3);
    TempDir cache;
    EndpointConfig config = quick_config(stub.base_url());
    config.max_retries = 1;
    const GenerationResult result =
        generate_candidates(corpus, config, "{findings}", cache.path());
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].report_id == "t1");
    CHECK(result.candidates.size() == 2);
    // cardinality: successes + error records = test split size
    CHECK(result.candidates.size() + result.errors.size() == 3);
}

TEST_CASE("malformed responses are per-sample errors") {
    StubEndpoint stub([](const std::string&, std::size_t) {
        return std::make_pair(200, std::string("{\"nope\": true}"));
    });
    const Corpus corpus = tiny_corpus(1);
    TempDir cache;
    EndpointConfig config = quick_config(stub.base_url());
    config.max_retries = 0;
    const GenerationResult result =
        generate_candidates(corpus, config, "{findings}", cache.path());
    REQUIRE(result.errors.size() == 1);
    CHECK(result.candidates.empty());
}

TEST_CASE("parallel generation covers every sample") {
    StubEndpoint stub(StubEndpoint::fixed_responder("parallel answer"));
    const Corpus corpus = tiny_corpus(16);
    TempDir cache;
    EndpointConfig config = quick_config(stub.base_url());
    config.parallelism = 4;
    const GenerationResult result =
        generate_candidates(corpus, config, "{findings}", cache.path());
    REQUIRE(result.errors.empty());
    REQUIRE(result.candidates.size() == 16);
    for (std::size_t i = 0; i < 16; ++i) {
        CHECK(result.candidates[i].report_id == "t" + std::to_string(i + 1));
    }
}

TEST_CASE("candidates round-trip through JSONL") {
    std::vector<Candidate> candidates;
    candidates.push_back(Candidate{"r1", "model-a", "impression one", 3, false, 0});
    candidates.push_back(Candidate{"r2", "model-a", "含中文的印象", 5, true, 1});

    TempDir dir;
    save_candidates(candidates, dir.file("c.jsonl"));
    const auto loaded = load_candidates(dir.file("c.jsonl"));
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].report_id == "r1");
    CHECK(loaded[1].impression == "含中文的印象");
    CHECK(loaded[1].model_name == "model-a");
}

TEST_CASE("endpoint config loading and validation") {
    TempDir dir;
    write_text(dir.file("endpoint.json"),
               R"({"model_name":"m","base_url":"http://h/v1","max_retries":2,)"
               R"("parallelism":3,"timeout_s":9.5,"api_key_env":"IMPEVAL_KEY"})");
    const EndpointConfig config = endpoint_config_from_file(dir.file("endpoint.json"));
    CHECK(config.model_name == "m");
    CHECK(config.parallelism == 3);
    CHECK(config.timeout_s == 9.5);
    CHECK(config.api_key_env == "IMPEVAL_KEY");

    write_text(dir.file("bad.json"), R"({"model_name":"m"})");
    CHECK_THROWS_AS(endpoint_config_from_file(dir.file("bad.json")), ConfigError);
    write_text(dir.file("badpar.json"),
               R"({"model_name":"m","base_url":"http://h","parallelism":0})");
    CHECK_THROWS_AS(endpoint_config_from_file(dir.file("badpar.json")), ConfigError);
}
