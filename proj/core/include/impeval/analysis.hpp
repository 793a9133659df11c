#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "impeval/clinical.hpp"
#include "impeval/embeddings.hpp"
#include "impeval/nlg.hpp"
#include "impeval/runner.hpp"

namespace impeval {

// Leaderboard columns, in output order.
enum class Metric {
    kBleu4,
    kRougeL,
    kMeteor,
    kBertScore,
    kSbert,
    kEcr,
    kUer,
    kFcr,
};

inline constexpr std::size_t kMetricCount = 8;
inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::kBleu4,  Metric::kRougeL, Metric::kMeteor, Metric::kBertScore,
    Metric::kSbert,  Metric::kEcr,    Metric::kUer,    Metric::kFcr,
};

std::string_view to_string(Metric metric);

// Which entity set UER compares E_gen against: entities of the reference
// impression (the default) or of the source findings.
enum class UerSource { kImpression, kFindings };

std::string_view to_string(UerSource source);
std::optional<UerSource> uer_source_from_string(std::string_view label);

struct ScoreOptions {
    TokenScheme scheme = TokenScheme::kCharacter;
    UerSource uer_source = UerSource::kImpression;
};

// All metric values for one (report, candidate) pair. Semantic fields stay
// empty when no embeddings were supplied for the sample.
struct SampleScore {
    std::string report_id;
    std::string model_name;
    std::string tracer;
    double bleu4 = 0.0;
    double rouge_l_f = 0.0;
    double meteor = 0.0;
    std::optional<double> bertscore_f;
    std::optional<double> sbert;
    double ecr = 0.0;
    double uer = 0.0;
    double fcr = 0.0;

    std::optional<double> value(Metric metric) const;
};

// Scores one candidate against its report. Throws ArgumentError when the
// candidate does not reference the report.
SampleScore score_sample(const Report& report, const Candidate& candidate,
                         const Matcher& matcher, const Rubric& rubric,
                         const ScoreOptions& options,
                         const EmbeddingStore* embeddings = nullptr);

struct LeaderboardRow {
    std::string model_name;
    std::size_t n = 0;
    std::array<std::optional<double>, kMetricCount> means;

    std::optional<double> mean(Metric metric) const {
        return means[static_cast<std::size_t>(metric)];
    }
};

// Per-model unweighted means over samples where the metric is present,
// sorted by descending BLEU-4 with ties broken by model name.
std::vector<LeaderboardRow> aggregate_leaderboard(std::span<const SampleScore> scores);

struct GroupMeans {
    std::size_t n = 0;
    std::array<std::optional<double>, kMetricCount> means;
};

// (model, tracer) cell -> per-metric means. Cells with no samples are simply
// absent, never zero.
using TracerMatrix = std::map<std::pair<std::string, std::string>, GroupMeans>;

TracerMatrix stratify_by_tracer(std::span<const SampleScore> scores);

struct Quartiles {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

// Median-of-halves (exclusive) quartiles of a non-empty sample.
Quartiles quartiles(std::vector<double> values);

// Five-number summaries per (model, metric); groups with no present values
// are omitted.
std::map<std::pair<std::string, Metric>, Quartiles>
distribution_stats(std::span<const SampleScore> scores);

// Sample Pearson correlation. Throws ArgumentError on length mismatch,
// fewer than two points, or zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

enum class CorrelationLevel { kSample, kModel };

std::string_view to_string(CorrelationLevel level);
std::optional<CorrelationLevel> correlation_level_from_string(std::string_view label);

// Symmetric matrix with unit diagonal; cells whose correlation is undefined
// (too few paired observations, zero variance) stay empty.
struct CorrelationMatrix {
    std::vector<Metric> metrics;
    std::vector<std::vector<std::optional<double>>> cells;
};

// Sample level correlates per-sample metric vectors; model level correlates
// leaderboard means across models.
CorrelationMatrix correlation_matrix(std::span<const SampleScore> scores,
                                     const std::vector<Metric>& metrics,
                                     CorrelationLevel level);

} // namespace impeval
