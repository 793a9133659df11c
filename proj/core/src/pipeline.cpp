#include "impeval/pipeline.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "impeval/errors.hpp"
#include "impeval/hashing.hpp"
#include "impeval/version.hpp"

namespace impeval {

using nlohmann::json;

std::string format_score(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.4f", value);
    return buffer;
}

namespace {

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::string json_string(std::string_view text) { return json(text).dump(); }

void write_file(const std::filesystem::path& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open output file: " + path.string());
    }
    out << data;
    if (!out) {
        throw IoError("write failure on output file: " + path.string());
    }
}

std::string safe_filename(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
        out += ok ? c : '_';
    }
    return out.empty() ? std::string("model") : out;
}

} // namespace

std::string score_to_json_line(const SampleScore& score) {
    std::string line = "{";
    line += "\"report_id\":" + json_string(score.report_id);
    line += ",\"model\":" + json_string(score.model_name);
    line += ",\"tracer\":" + json_string(score.tracer);
    line += ",\"bleu4\":" + format_score(score.bleu4);
    line += ",\"rouge_l_f\":" + format_score(score.rouge_l_f);
    line += ",\"meteor\":" + format_score(score.meteor);
    if (score.bertscore_f) {
        line += ",\"bertscore_f\":" + format_score(*score.bertscore_f);
    }
    if (score.sbert) {
        line += ",\"sbert\":" + format_score(*score.sbert);
    }
    line += ",\"ecr\":" + format_score(score.ecr);
    line += ",\"uer\":" + format_score(score.uer);
    line += ",\"fcr\":" + format_score(score.fcr);
    line += "}";
    return line;
}

std::string leaderboard_to_csv(const std::vector<LeaderboardRow>& rows) {
    std::string csv = "model,bleu4,rouge_l,meteor,bertscore,sbert,ecr,uer,fcr,n\n";
    for (const LeaderboardRow& row : rows) {
        csv += csv_field(row.model_name);
        for (Metric metric : kAllMetrics) {
            csv += ',';
            if (const auto mean = row.mean(metric)) {
                csv += format_score(*mean);
            }
        }
        csv += ',' + std::to_string(row.n) + '\n';
    }
    return csv;
}

std::string stratification_to_csv(const TracerMatrix& matrix, Metric metric) {
    std::set<std::string> models;
    std::set<std::string> tracers;
    for (const auto& [key, cell] : matrix) {
        models.insert(key.first);
        tracers.insert(key.second);
    }
    std::string csv = "model";
    for (const std::string& tracer : tracers) {
        csv += ',' + csv_field(tracer);
    }
    csv += '\n';
    for (const std::string& model : models) {
        csv += csv_field(model);
        for (const std::string& tracer : tracers) {
            csv += ',';
            auto it = matrix.find({model, tracer});
            if (it != matrix.end()) {
                if (const auto mean = it->second.means[static_cast<std::size_t>(metric)]) {
                    csv += format_score(*mean);
                }
            }
        }
        csv += '\n';
    }
    return csv;
}

std::string correlation_to_csv(const CorrelationMatrix& matrix) {
    std::string csv = "metric";
    for (Metric metric : matrix.metrics) {
        csv += ',';
        csv += to_string(metric);
    }
    csv += '\n';
    for (std::size_t i = 0; i < matrix.metrics.size(); ++i) {
        csv += to_string(matrix.metrics[i]);
        for (std::size_t j = 0; j < matrix.metrics.size(); ++j) {
            csv += ',';
            if (matrix.cells[i][j]) {
                csv += format_score(*matrix.cells[i][j]);
            }
        }
        csv += '\n';
    }
    return csv;
}

std::string distribution_to_csv(
    const std::map<std::pair<std::string, Metric>, Quartiles>& stats) {
    std::string csv = "model,metric,min,q1,median,q3,max\n";
    for (const auto& [key, q] : stats) {
        csv += csv_field(key.first);
        csv += ',';
        csv += to_string(key.second);
        csv += ',' + format_score(q.min) + ',' + format_score(q.q1) + ',' +
               format_score(q.median) + ',' + format_score(q.q3) + ',' +
               format_score(q.max) + '\n';
    }
    return csv;
}

std::vector<SampleScore> score_all(const Corpus& corpus,
                                   const std::vector<Candidate>& candidates,
                                   const Matcher& matcher, const Rubric& rubric,
                                   const ScoreOptions& options,
                                   const EmbeddingStore* embeddings, unsigned jobs,
                                   std::vector<SampleError>* errors) {
    std::unordered_map<std::string_view, const Report*> by_id;
    by_id.reserve(corpus.reports.size());
    for (const Report& report : corpus.reports) {
        by_id.emplace(report.id, &report);
    }

    struct Slot {
        std::optional<SampleScore> score;
        std::optional<SampleError> error;
    };
    std::vector<Slot> slots(candidates.size());

    auto score_one = [&](std::size_t index) {
        const Candidate& candidate = candidates[index];
        auto it = by_id.find(candidate.report_id);
        if (it == by_id.end()) {
            slots[index].error = SampleError{candidate.report_id, candidate.model_name,
                                             "candidate references unknown report id"};
            return;
        }
        try {
            slots[index].score =
                score_sample(*it->second, candidate, matcher, rubric, options, embeddings);
        } catch (const std::exception& e) {
            slots[index].error =
                SampleError{candidate.report_id, candidate.model_name, e.what()};
        }
    };

    unsigned thread_count = jobs == 0 ? std::thread::hardware_concurrency() : jobs;
    if (thread_count == 0) {
        thread_count = 1;
    }
    thread_count = std::min<unsigned>(thread_count,
                                      std::max<std::size_t>(candidates.size(), 1));
    if (thread_count <= 1) {
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            score_one(i);
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t index = next.fetch_add(1);
                if (index >= candidates.size()) {
                    return;
                }
                score_one(index);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (unsigned i = 0; i < thread_count; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& thread : pool) {
            thread.join();
        }
    }

    // Results keep candidate order regardless of scheduling, so parallel and
    // serial runs emit identical bytes.
    std::vector<SampleScore> scores;
    scores.reserve(candidates.size());
    for (Slot& slot : slots) {
        if (slot.score) {
            scores.push_back(std::move(*slot.score));
        } else if (slot.error && errors != nullptr) {
            errors->push_back(std::move(*slot.error));
        }
    }
    return scores;
}

namespace {

void require_readable(const std::filesystem::path& path, const char* role) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec) || ec) {
        throw ConfigError(std::string(role) + " path does not exist: " + path.string());
    }
}

std::string lexicon_content_hash(const Lexicon& lexicon) {
    std::string blob;
    for (const LexiconEntry& entry : lexicon.terms) {
        blob += entry.term;
        blob += '\t';
        blob += to_string(entry.category);
        blob += '\n';
    }
    return sha256_hex(blob);
}

json config_to_json(const RunConfig& config, unsigned resolved_jobs) {
    json doc;
    doc["corpus"] = config.corpus_path.string();
    json lexicons = json::array();
    for (const auto& path : config.lexicon_paths) {
        lexicons.push_back(path.string());
    }
    doc["lexicons"] = lexicons;
    doc["rubric"] = config.rubric_path ? json(config.rubric_path->string()) : json("default");
    doc["candidates"] =
        config.candidates_path ? json(config.candidates_path->string()) : json();
    doc["endpoint_config"] =
        config.endpoint_config_path ? json(config.endpoint_config_path->string()) : json();
    doc["prompt_template"] =
        config.prompt_template_path ? json(config.prompt_template_path->string()) : json();
    doc["cache_dir"] = config.cache_dir ? json(config.cache_dir->string()) : json();
    doc["embeddings"] =
        config.embeddings_path ? json(config.embeddings_path->string()) : json();
    doc["out"] = config.out_dir.string();
    doc["scheme"] = std::string(to_string(config.scheme));
    doc["uer_source"] = std::string(to_string(config.uer_source));
    doc["pool"] = std::string(to_string(config.pool));
    doc["jobs"] = resolved_jobs;
    doc["seed"] = config.seed;
    return doc;
}

} // namespace

EvaluateSummary run_evaluate(const RunConfig& config) {
    require_readable(config.corpus_path, "corpus");
    if (config.lexicon_paths.empty()) {
        throw ConfigError("at least one lexicon path is required");
    }
    for (const auto& path : config.lexicon_paths) {
        require_readable(path, "lexicon");
    }
    if (config.rubric_path) {
        require_readable(*config.rubric_path, "rubric");
    }
    if (config.embeddings_path) {
        require_readable(*config.embeddings_path, "embeddings");
    }
    if (!config.candidates_path && !config.endpoint_config_path) {
        throw ConfigError("either a candidates file or an endpoint config is required");
    }

    const Corpus corpus = load_corpus(config.corpus_path);
    const Lexicon lexicon = load_lexicon(config.lexicon_paths);
    const Matcher matcher = build_matcher(lexicon);
    const Rubric rubric =
        config.rubric_path ? load_rubric(*config.rubric_path) : default_rubric();

    EvaluateSummary summary;
    std::vector<Candidate> candidates;
    if (config.candidates_path) {
        require_readable(*config.candidates_path, "candidates");
        candidates = load_candidates(*config.candidates_path);
    } else {
        require_readable(*config.endpoint_config_path, "endpoint config");
        if (!config.prompt_template_path) {
            throw ConfigError("endpoint generation requires a prompt template");
        }
        require_readable(*config.prompt_template_path, "prompt template");
        const EndpointConfig endpoint =
            endpoint_config_from_file(*config.endpoint_config_path);
        std::ifstream template_in(*config.prompt_template_path);
        std::stringstream template_buf;
        template_buf << template_in.rdbuf();
        const std::filesystem::path cache =
            config.cache_dir ? *config.cache_dir : config.out_dir / "cache";
        GenerationResult generated =
            generate_candidates(corpus, endpoint, template_buf.str(), cache);
        candidates = std::move(generated.candidates);
        summary.errors = std::move(generated.errors);
        // Persist what was generated so the run can be re-scored offline.
        std::filesystem::create_directories(config.out_dir);
        save_candidates(candidates, config.out_dir / "candidates.jsonl");
        summary.artifacts.push_back(config.out_dir / "candidates.jsonl");
    }

    std::optional<EmbeddingStore> embeddings;
    if (config.embeddings_path) {
        embeddings = load_embeddings(*config.embeddings_path);
    }

    ScoreOptions options;
    options.scheme = config.scheme;
    options.uer_source = config.uer_source;

    unsigned resolved_jobs = config.jobs == 0 ? std::thread::hardware_concurrency() : config.jobs;
    if (resolved_jobs == 0) {
        resolved_jobs = 1;
    }

    const std::vector<SampleScore> scores =
        score_all(corpus, candidates, matcher, rubric, options,
                  embeddings ? &*embeddings : nullptr, resolved_jobs, &summary.errors);

    std::filesystem::create_directories(config.out_dir);
    const auto emit = [&](const std::filesystem::path& name, std::string_view data) {
        const std::filesystem::path path = config.out_dir / name;
        write_file(path, data);
        summary.artifacts.push_back(path);
    };

    {
        std::string jsonl;
        for (const SampleScore& score : scores) {
            jsonl += score_to_json_line(score);
            jsonl += '\n';
        }
        emit("scores.jsonl", jsonl);
    }

    summary.leaderboard = aggregate_leaderboard(scores);
    emit("leaderboard.csv", leaderboard_to_csv(summary.leaderboard));

    const TracerMatrix stratified = stratify_by_tracer(scores);
    for (Metric metric : kAllMetrics) {
        emit(std::string("stratified_") + std::string(to_string(metric)) + ".csv",
             stratification_to_csv(stratified, metric));
    }

    emit("distribution.csv", distribution_to_csv(distribution_stats(scores)));

    const std::vector<Metric> metrics(kAllMetrics.begin(), kAllMetrics.end());
    if (config.pool == CorrelationLevel::kSample) {
        emit("correlations_sample.csv",
             correlation_to_csv(correlation_matrix(scores, metrics, CorrelationLevel::kSample)));
    } else {
        // Within-model pooling: one sample-level matrix per model.
        std::set<std::string> models;
        for (const SampleScore& score : scores) {
            models.insert(score.model_name);
        }
        for (const std::string& model : models) {
            std::vector<SampleScore> subset;
            for (const SampleScore& score : scores) {
                if (score.model_name == model) {
                    subset.push_back(score);
                }
            }
            emit("correlations_sample_" + safe_filename(model) + ".csv",
                 correlation_to_csv(
                     correlation_matrix(subset, metrics, CorrelationLevel::kSample)));
        }
    }
    emit("correlations_model.csv",
         correlation_to_csv(correlation_matrix(scores, metrics, CorrelationLevel::kModel)));

    // Manifest: enough provenance to re-execute the run bit-identically.
    json manifest;
    manifest["tool"] = "impeval";
    manifest["version"] = kVersion;
    manifest["config"] = config_to_json(config, resolved_jobs);
    manifest["config_hash"] = sha256_hex(config_to_json(config, resolved_jobs).dump());
    manifest["lexicon_hash"] = lexicon_content_hash(lexicon);
    json inputs;
    inputs["corpus"] = {{"path", config.corpus_path.string()},
                        {"sha256", sha256_file(config.corpus_path)}};
    json lexicon_inputs = json::array();
    for (const auto& path : config.lexicon_paths) {
        lexicon_inputs.push_back(
            {{"path", path.string()}, {"sha256", sha256_file(path)}});
    }
    inputs["lexicons"] = lexicon_inputs;
    if (config.rubric_path) {
        inputs["rubric"] = {{"path", config.rubric_path->string()},
                            {"sha256", sha256_file(*config.rubric_path)}};
    } else {
        inputs["rubric"] = "default";
    }
    if (config.candidates_path) {
        inputs["candidates"] = {{"path", config.candidates_path->string()},
                                {"sha256", sha256_file(*config.candidates_path)}};
    }
    if (config.embeddings_path) {
        inputs["embeddings"] = {{"path", config.embeddings_path->string()},
                                {"sha256", sha256_file(*config.embeddings_path)}};
    }
    manifest["inputs"] = inputs;
    manifest["counts"] = {{"reports", corpus.reports.size()},
                          {"candidates", candidates.size()},
                          {"scored", scores.size()}};
    json error_list = json::array();
    for (const SampleError& error : summary.errors) {
        error_list.push_back({{"id", error.report_id},
                              {"model", error.model_name},
                              {"message", error.message}});
    }
    manifest["errors"] = error_list;
    emit("manifest.json", manifest.dump(2) + "\n");

    summary.reports = corpus.reports.size();
    summary.candidates = candidates.size();
    summary.scored = scores.size();
    return summary;
}

} // namespace impeval
