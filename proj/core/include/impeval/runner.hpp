#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "impeval/corpus.hpp"

namespace impeval {

// Chat-completion style endpoint description. API keys travel only through
// the named environment variable, never through config files or flags.
struct EndpointConfig {
    std::string model_name;
    std::string base_url;             // e.g. http://127.0.0.1:8080/v1
    std::string api_key_env;          // name of the env var holding the key; may be empty
    std::string request_template = "chat_completion";
    int max_retries = 3;
    int parallelism = 1;
    double timeout_s = 60.0;
    int initial_backoff_ms = 250;     // doubled per retry
};

EndpointConfig endpoint_config_from_file(const std::filesystem::path& path);

struct Candidate {
    std::string report_id;
    std::string model_name;
    std::string impression;
    std::uint64_t latency_ms = 0;
    bool cached = false;
    int retries = 0;
};

// One generation failure; the run continues past it.
struct SampleError {
    std::string report_id;
    std::string model_name;
    std::string message;
};

struct GenerationResult {
    std::vector<Candidate> candidates; // corpus order
    std::vector<SampleError> errors;
};

// Substitutes the single `{findings}` placeholder. Missing or duplicate
// placeholders are a ConfigError; the substitution is single-pass, so a
// literal "{findings}" inside the findings text survives.
std::string render_prompt(const std::string& template_text, const std::string& findings);

// Deterministic cache key for one request: hex SHA-256 over model name and
// prompt.
std::string candidate_cache_key(const std::string& model_name, const std::string& prompt);

// Runs the zero-shot protocol over the corpus test split: per report either
// a cache hit or one endpoint call with exponential backoff, at most
// `parallelism` calls in flight, cache files written atomically.
GenerationResult generate_candidates(const Corpus& corpus, const EndpointConfig& config,
                                     const std::string& template_text,
                                     const std::filesystem::path& cache_dir);

// Candidates JSONL: {"id": str, "model": str, "impression": str}. Supplying
// candidates from file bypasses the network entirely.
std::vector<Candidate> load_candidates(const std::filesystem::path& path);
void save_candidates(const std::vector<Candidate>& candidates,
                     const std::filesystem::path& path);

} // namespace impeval
