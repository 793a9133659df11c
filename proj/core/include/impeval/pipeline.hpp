#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "impeval/analysis.hpp"

namespace impeval {

// Fully resolved configuration for one evaluate run. All randomness anywhere
// in a run flows from `seed`; there is no hidden entropy.
struct RunConfig {
    std::filesystem::path corpus_path;
    std::vector<std::filesystem::path> lexicon_paths;
    std::optional<std::filesystem::path> rubric_path; // absent = built-in default
    std::optional<std::filesystem::path> candidates_path;
    std::optional<std::filesystem::path> endpoint_config_path;
    std::optional<std::filesystem::path> prompt_template_path;
    std::optional<std::filesystem::path> cache_dir;
    std::optional<std::filesystem::path> embeddings_path;
    std::filesystem::path out_dir;
    TokenScheme scheme = TokenScheme::kCharacter;
    UerSource uer_source = UerSource::kImpression;
    CorrelationLevel pool = CorrelationLevel::kSample;
    unsigned jobs = 0; // 0 = hardware concurrency
    std::uint64_t seed = 0;
};

struct EvaluateSummary {
    std::size_t reports = 0;
    std::size_t candidates = 0;
    std::size_t scored = 0;
    std::vector<SampleError> errors;
    std::vector<LeaderboardRow> leaderboard;
    std::vector<std::filesystem::path> artifacts;
};

// Runs the whole scoring pipeline and writes scores.jsonl, leaderboard.csv,
// per-metric tracer stratification CSVs, sample- and model-level correlation
// CSVs, distribution.csv and manifest.json into out_dir. Output bytes depend
// only on the config (not on jobs).
EvaluateSummary run_evaluate(const RunConfig& config);

// Parallel map over candidate/report pairs; exposed for tests and tools.
std::vector<SampleScore> score_all(const Corpus& corpus,
                                   const std::vector<Candidate>& candidates,
                                   const Matcher& matcher, const Rubric& rubric,
                                   const ScoreOptions& options,
                                   const EmbeddingStore* embeddings, unsigned jobs,
                                   std::vector<SampleError>* errors);

// Fixed-precision formatting used by every numeric artifact (4 decimals).
std::string format_score(double value);

std::string score_to_json_line(const SampleScore& score);
std::string leaderboard_to_csv(const std::vector<LeaderboardRow>& rows);
std::string stratification_to_csv(const TracerMatrix& matrix, Metric metric);
std::string correlation_to_csv(const CorrelationMatrix& matrix);
std::string distribution_to_csv(
    const std::map<std::pair<std::string, Metric>, Quartiles>& stats);

} // namespace impeval
