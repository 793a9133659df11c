#include "impeval/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "impeval/errors.hpp"

namespace impeval {

std::string_view to_string(Metric metric) {
    switch (metric) {
    case Metric::kBleu4:
        return "bleu4";
    case Metric::kRougeL:
        return "rouge_l";
    case Metric::kMeteor:
        return "meteor";
    case Metric::kBertScore:
        return "bertscore";
    case Metric::kSbert:
        return "sbert";
    case Metric::kEcr:
        return "ecr";
    case Metric::kUer:
        return "uer";
    case Metric::kFcr:
        return "fcr";
    }
    return "bleu4";
}

std::string_view to_string(UerSource source) {
    return source == UerSource::kImpression ? "impression" : "findings";
}

std::optional<UerSource> uer_source_from_string(std::string_view label) {
    if (label == "impression") return UerSource::kImpression;
    if (label == "findings") return UerSource::kFindings;
    return std::nullopt;
}

std::string_view to_string(CorrelationLevel level) {
    return level == CorrelationLevel::kSample ? "sample" : "model";
}

std::optional<CorrelationLevel> correlation_level_from_string(std::string_view label) {
    if (label == "sample") return CorrelationLevel::kSample;
    if (label == "model") return CorrelationLevel::kModel;
    return std::nullopt;
}

std::optional<double> SampleScore::value(Metric metric) const {
    switch (metric) {
    case Metric::kBleu4:
        return bleu4;
    case Metric::kRougeL:
        return rouge_l_f;
    case Metric::kMeteor:
        return meteor;
    case Metric::kBertScore:
        return bertscore_f;
    case Metric::kSbert:
        return sbert;
    case Metric::kEcr:
        return ecr;
    case Metric::kUer:
        return uer;
    case Metric::kFcr:
        return fcr;
    }
    return std::nullopt;
}

SampleScore score_sample(const Report& report, const Candidate& candidate,
                         const Matcher& matcher, const Rubric& rubric,
                         const ScoreOptions& options, const EmbeddingStore* embeddings) {
    if (candidate.report_id != report.id) {
        throw ArgumentError("score_sample: candidate references report '" +
                            candidate.report_id + "', got report '" + report.id + "'");
    }

    SampleScore score;
    score.report_id = report.id;
    score.model_name = candidate.model_name;
    score.tracer = report.tracer;

    const EntitySet e_ref = extract_entity_set(matcher, report.impression);
    const EntitySet e_gen = extract_entity_set(matcher, candidate.impression);
    score.ecr = ecr(e_ref, e_gen);
    if (options.uer_source == UerSource::kImpression) {
        score.uer = uer(e_ref, e_gen);
    } else {
        score.uer = uer(extract_entity_set(matcher, report.findings), e_gen);
    }
    score.fcr = fcr(candidate.impression, rubric, matcher).first;

    const TokenSequence cand_tokens = tokenize(candidate.impression, options.scheme);
    const TokenSequence ref_tokens = tokenize(report.impression, options.scheme);
    score.bleu4 = ref_tokens.empty() ? 0.0 : bleu(cand_tokens, ref_tokens);
    score.rouge_l_f = rouge_l(cand_tokens, ref_tokens).f;
    score.meteor = meteor_lite(cand_tokens, ref_tokens);

    if (embeddings != nullptr) {
        const EmbeddingBundle* cand_bundle =
            embeddings->find(report.id, EmbeddingSide::kCandidate, candidate.model_name);
        const EmbeddingBundle* ref_bundle =
            embeddings->find(report.id, EmbeddingSide::kReference, std::string());
        if (cand_bundle && ref_bundle) {
            if (!cand_bundle->token_vectors.empty() && !ref_bundle->token_vectors.empty()) {
                const BertScore bert = bertscore_from_embeddings(cand_bundle->token_vectors,
                                                                 ref_bundle->token_vectors);
                // Clamp into the shared [0,1] column range.
                score.bertscore_f = std::max(0.0, bert.f);
            }
            if (!cand_bundle->sentence_vector.empty() &&
                !ref_bundle->sentence_vector.empty()) {
                score.sbert = std::max(
                    0.0, sentence_cosine(cand_bundle->sentence_vector,
                                         ref_bundle->sentence_vector));
            }
        }
    }
    return score;
}

namespace {

struct Accumulator {
    std::array<double, kMetricCount> sums{};
    std::array<std::size_t, kMetricCount> counts{};
    std::size_t n = 0;

    void add(const SampleScore& score) {
        ++n;
        for (std::size_t m = 0; m < kMetricCount; ++m) {
            if (const auto value = score.value(kAllMetrics[m])) {
                sums[m] += *value;
                ++counts[m];
            }
        }
    }

    std::array<std::optional<double>, kMetricCount> means() const {
        std::array<std::optional<double>, kMetricCount> out;
        for (std::size_t m = 0; m < kMetricCount; ++m) {
            if (counts[m] > 0) {
                out[m] = sums[m] / static_cast<double>(counts[m]);
            }
        }
        return out;
    }
};

} // namespace

std::vector<LeaderboardRow> aggregate_leaderboard(std::span<const SampleScore> scores) {
    std::map<std::string, Accumulator> groups;
    for (const SampleScore& score : scores) {
        groups[score.model_name].add(score);
    }
    std::vector<LeaderboardRow> rows;
    rows.reserve(groups.size());
    for (const auto& [model, acc] : groups) {
        LeaderboardRow row;
        row.model_name = model;
        row.n = acc.n;
        row.means = acc.means();
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
        const double bleu_a = a.mean(Metric::kBleu4).value_or(0.0);
        const double bleu_b = b.mean(Metric::kBleu4).value_or(0.0);
        if (bleu_a != bleu_b) {
            return bleu_a > bleu_b;
        }
        return a.model_name < b.model_name;
    });
    return rows;
}

TracerMatrix stratify_by_tracer(std::span<const SampleScore> scores) {
    std::map<std::pair<std::string, std::string>, Accumulator> groups;
    for (const SampleScore& score : scores) {
        groups[{score.model_name, score.tracer}].add(score);
    }
    TracerMatrix matrix;
    for (const auto& [key, acc] : groups) {
        GroupMeans cell;
        cell.n = acc.n;
        cell.means = acc.means();
        matrix.emplace(key, std::move(cell));
    }
    return matrix;
}

namespace {

double median_of(std::span<const double> sorted) {
    const std::size_t n = sorted.size();
    if (n % 2 == 1) {
        return sorted[n / 2];
    }
    return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

} // namespace

Quartiles quartiles(std::vector<double> values) {
    if (values.empty()) {
        throw ArgumentError("quartiles: empty sample");
    }
    std::sort(values.begin(), values.end());
    Quartiles q;
    q.min = values.front();
    q.max = values.back();
    q.median = median_of(values);
    const std::size_t n = values.size();
    if (n == 1) {
        q.q1 = q.q3 = values[0];
        return q;
    }
    // Exclusive halves: an odd-length sample drops its middle element.
    const std::size_t half = n / 2;
    q.q1 = median_of(std::span<const double>(values.data(), half));
    q.q3 = median_of(std::span<const double>(values.data() + (n - half), half));
    return q;
}

std::map<std::pair<std::string, Metric>, Quartiles>
distribution_stats(std::span<const SampleScore> scores) {
    std::map<std::pair<std::string, Metric>, std::vector<double>> groups;
    for (const SampleScore& score : scores) {
        for (Metric metric : kAllMetrics) {
            if (const auto value = score.value(metric)) {
                groups[{score.model_name, metric}].push_back(*value);
            }
        }
    }
    std::map<std::pair<std::string, Metric>, Quartiles> stats;
    for (auto& [key, values] : groups) {
        stats.emplace(key, quartiles(std::move(values)));
    }
    return stats;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw ArgumentError("pearson: length mismatch");
    }
    if (x.size() < 2) {
        throw ArgumentError("pearson: need at least two points");
    }
    const auto n = static_cast<double>(x.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mean_x += x[i];
        mean_y += y[i];
    }
    mean_x /= n;
    mean_y /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mean_x;
        const double dy = y[i] - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw ArgumentError("pearson: zero variance");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(std::span<const SampleScore> scores,
                                     const std::vector<Metric>& metrics,
                                     CorrelationLevel level) {
    CorrelationMatrix matrix;
    matrix.metrics = metrics;
    const std::size_t k = metrics.size();
    matrix.cells.assign(k, std::vector<std::optional<double>>(k));

    // Rows of the observation table: one per sample or one per model.
    std::vector<std::array<std::optional<double>, kMetricCount>> observations;
    if (level == CorrelationLevel::kSample) {
        observations.reserve(scores.size());
        for (const SampleScore& score : scores) {
            auto& row = observations.emplace_back();
            for (Metric metric : metrics) {
                row[static_cast<std::size_t>(metric)] = score.value(metric);
            }
        }
    } else {
        for (const LeaderboardRow& row : aggregate_leaderboard(scores)) {
            auto& obs = observations.emplace_back();
            for (Metric metric : metrics) {
                obs[static_cast<std::size_t>(metric)] = row.mean(metric);
            }
        }
    }

    for (std::size_t i = 0; i < k; ++i) {
        const auto mi = static_cast<std::size_t>(metrics[i]);
        bool any = false;
        for (const auto& obs : observations) {
            if (obs[mi]) {
                any = true;
                break;
            }
        }
        if (any) {
            matrix.cells[i][i] = 1.0;
        }
        for (std::size_t j = i + 1; j < k; ++j) {
            const auto mj = static_cast<std::size_t>(metrics[j]);
            std::vector<double> xs;
            std::vector<double> ys;
            for (const auto& obs : observations) {
                if (obs[mi] && obs[mj]) {
                    xs.push_back(*obs[mi]);
                    ys.push_back(*obs[mj]);
                }
            }
            std::optional<double> r;
            try {
                r = pearson(xs, ys);
            } catch (const ArgumentError&) {
                r = std::nullopt; // undefined cell
            }
            matrix.cells[i][j] = r;
            matrix.cells[j][i] = r;
        }
    }
    return matrix;
}

} // namespace impeval
