// impeval — scoring and analysis pipeline for radiology impression
// generation: dictionary-based entity metrics (ECR/UER/FCR), lexical overlap
// metrics, leaderboards, tracer stratification and metric correlations.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "impeval/analysis.hpp"
#include "impeval/clinical.hpp"
#include "impeval/corpus.hpp"
#include "impeval/errors.hpp"
#include "impeval/extraction.hpp"
#include "impeval/fixture.hpp"
#include "impeval/pipeline.hpp"
#include "impeval/runner.hpp"
#include "impeval/version.hpp"

namespace {

using namespace impeval;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

int run_guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

std::vector<std::pair<std::string, double>> parse_tracer_mix(const std::string& text) {
    std::vector<std::pair<std::string, double>> mix;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("tracer mix entries look like TAG=WEIGHT, got '" + item + "'");
        }
        const std::string tag = item.substr(0, eq);
        double weight = 0.0;
        try {
            weight = std::stod(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw ConfigError("bad tracer weight in '" + item + "'");
        }
        mix.emplace_back(tag, weight);
    }
    if (mix.empty()) {
        throw ConfigError("tracer mix is empty");
    }
    return mix;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"evaluation pipeline for findings->impression generation"};
    app.set_version_flag("--version", std::string("impeval ") + kVersion);
    app.require_subcommand(1);

    // ---- evaluate ----
    auto* evaluate = app.add_subcommand("evaluate", "score candidates and write analysis artifacts");
    std::string ev_corpus;
    std::vector<std::string> ev_lexicons;
    std::string ev_rubric;
    std::string ev_candidates;
    std::string ev_endpoint;
    std::string ev_template;
    std::string ev_cache;
    std::string ev_embeddings;
    std::string ev_out;
    std::string ev_scheme = "character";
    std::string ev_uer_source = "impression";
    std::string ev_pool = "sample";
    unsigned ev_jobs = 0;
    std::uint64_t ev_seed = 0;
    evaluate->add_option("--corpus", ev_corpus, "corpus JSONL path")->required();
    evaluate->add_option("--lexicon", ev_lexicons, "lexicon file (repeatable)")->required();
    evaluate->add_option("--rubric", ev_rubric, "rubric JSON (default: built-in)");
    evaluate->add_option("--candidates", ev_candidates, "candidates JSONL path");
    evaluate->add_option("--endpoint", ev_endpoint, "endpoint config JSON (generate instead of --candidates)");
    evaluate->add_option("--template", ev_template, "prompt template file for --endpoint");
    evaluate->add_option("--cache", ev_cache, "response cache directory for --endpoint");
    evaluate->add_option("--embeddings", ev_embeddings, "embeddings JSONL for semantic scores");
    evaluate->add_option("--out", ev_out, "output directory")->required();
    evaluate->add_option("--scheme", ev_scheme, "tokenization: character|whitespace");
    evaluate->add_option("--uer-source", ev_uer_source, "UER reference set: impression|findings");
    evaluate->add_option("--pool", ev_pool, "sample correlation pooling: sample|model");
    evaluate->add_option("--jobs", ev_jobs, "worker threads (0 = all cores)");
    evaluate->add_option("--seed", ev_seed, "run seed recorded in the manifest");

    // ---- generate ----
    auto* generate = app.add_subcommand("generate", "produce candidates from a model endpoint");
    std::string gen_corpus;
    std::string gen_endpoint;
    std::string gen_template;
    std::string gen_cache = "cache";
    std::string gen_out;
    generate->add_option("--corpus", gen_corpus, "corpus JSONL path")->required();
    generate->add_option("--endpoint", gen_endpoint, "endpoint config JSON")->required();
    generate->add_option("--template", gen_template, "prompt template file")->required();
    generate->add_option("--cache", gen_cache, "response cache directory");
    generate->add_option("--out", gen_out, "candidates JSONL output path")->required();

    // ---- fixture ----
    auto* fixture_cmd = app.add_subcommand("fixture", "generate a synthetic corpus with entity ground truth");
    std::uint64_t fx_seed = 7;
    std::size_t fx_reports = 100;
    std::size_t fx_patients = 20;
    std::string fx_mix;
    std::string fx_out;
    fixture_cmd->add_option("--seed", fx_seed, "generator seed");
    fixture_cmd->add_option("--reports", fx_reports, "number of reports");
    fixture_cmd->add_option("--patients", fx_patients, "number of patients");
    fixture_cmd->add_option("--tracer-mix", fx_mix, "TAG=WEIGHT,... (default FDG-heavy)");
    fixture_cmd->add_option("--out", fx_out, "output directory")->required();

    // ---- ner-debug ----
    auto* ner = app.add_subcommand("ner-debug", "print dictionary matches with spans for a text");
    std::vector<std::string> ner_lexicons;
    std::string ner_text;
    ner->add_option("--lexicon", ner_lexicons, "lexicon file (repeatable)")->required();
    ner->add_option("--text", ner_text, "text to scan")->required();

    // ---- rubric ----
    auto* rubric_cmd = app.add_subcommand("rubric", "rubric utilities");
    bool dump_default = false;
    rubric_cmd->add_flag("--dump-default", dump_default, "print the built-in rubric JSON");

    // ---- split-check ----
    auto* split_check = app.add_subcommand("split-check", "verify patient-level split integrity");
    std::string sc_corpus;
    split_check->add_option("--corpus", sc_corpus, "corpus JSONL path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (evaluate->parsed()) {
        return run_guarded([&] {
            RunConfig config;
            config.corpus_path = ev_corpus;
            for (const auto& path : ev_lexicons) {
                config.lexicon_paths.emplace_back(path);
            }
            if (!ev_rubric.empty()) config.rubric_path = ev_rubric;
            if (!ev_candidates.empty()) config.candidates_path = ev_candidates;
            if (!ev_endpoint.empty()) config.endpoint_config_path = ev_endpoint;
            if (!ev_template.empty()) config.prompt_template_path = ev_template;
            if (!ev_cache.empty()) config.cache_dir = ev_cache;
            if (!ev_embeddings.empty()) config.embeddings_path = ev_embeddings;
            config.out_dir = ev_out;
            if (auto scheme = scheme_from_string(ev_scheme)) {
                config.scheme = *scheme;
            } else {
                throw ConfigError("unknown scheme '" + ev_scheme + "'");
            }
            if (auto source = uer_source_from_string(ev_uer_source)) {
                config.uer_source = *source;
            } else {
                throw ConfigError("unknown uer source '" + ev_uer_source + "'");
            }
            if (auto pool = correlation_level_from_string(ev_pool)) {
                config.pool = *pool;
            } else {
                throw ConfigError("unknown pool '" + ev_pool + "'");
            }
            config.jobs = ev_jobs;
            config.seed = ev_seed;

            const EvaluateSummary summary = run_evaluate(config);
            std::cout << "scored " << summary.scored << "/" << summary.candidates
                      << " candidates over " << summary.reports << " reports\n";
            for (const LeaderboardRow& row : summary.leaderboard) {
                std::cout << row.model_name;
                for (Metric metric : kAllMetrics) {
                    std::cout << ' ' << to_string(metric) << '=';
                    if (const auto mean = row.mean(metric)) {
                        std::cout << format_score(*mean);
                    } else {
                        std::cout << "-";
                    }
                }
                std::cout << " n=" << row.n << '\n';
            }
            if (!summary.errors.empty()) {
                std::cerr << summary.errors.size()
                          << " sample(s) failed; see manifest.json\n";
            }
            return kExitOk;
        });
    }

    if (generate->parsed()) {
        return run_guarded([&] {
            const Corpus corpus = load_corpus(gen_corpus);
            const EndpointConfig endpoint = endpoint_config_from_file(gen_endpoint);
            std::ifstream template_in(gen_template);
            if (!template_in) {
                throw ConfigError("cannot open prompt template: " + gen_template);
            }
            std::stringstream buffer;
            buffer << template_in.rdbuf();
            const GenerationResult result =
                generate_candidates(corpus, endpoint, buffer.str(), gen_cache);
            save_candidates(result.candidates, gen_out);
            std::cout << "generated " << result.candidates.size() << " candidates ("
                      << result.errors.size() << " failures)\n";
            for (const SampleError& error : result.errors) {
                std::cerr << error.report_id << ": " << error.message << '\n';
            }
            return result.errors.empty() ? kExitOk : kExitRuntime;
        });
    }

    if (fixture_cmd->parsed()) {
        return run_guarded([&] {
            FixtureSpec spec;
            spec.seed = fx_seed;
            spec.n_reports = fx_reports;
            spec.n_patients = fx_patients;
            if (!fx_mix.empty()) {
                spec.tracer_mix = parse_tracer_mix(fx_mix);
            }
            const Fixture fixture = generate_fixture(spec);
            write_fixture(fixture, fx_out);
            std::cout << "wrote " << fixture.corpus.reports.size() << " reports to "
                      << fx_out << '\n';
            return kExitOk;
        });
    }

    if (ner->parsed()) {
        return run_guarded([&] {
            std::vector<std::filesystem::path> paths(ner_lexicons.begin(),
                                                     ner_lexicons.end());
            for (const auto& path : paths) {
                if (!std::filesystem::exists(path)) {
                    throw ConfigError("lexicon path does not exist: " + path.string());
                }
            }
            const Matcher matcher = build_matcher(load_lexicon(paths));
            for (const EntityMatch& match : extract_entities(matcher, ner_text)) {
                std::cout << match.start << '\t' << match.length << '\t'
                          << to_string(match.category) << '\t' << match.term << '\n';
            }
            return kExitOk;
        });
    }

    if (rubric_cmd->parsed()) {
        return run_guarded([&] {
            if (!dump_default) {
                throw ConfigError("rubric: nothing to do (try --dump-default)");
            }
            std::cout << rubric_to_json(default_rubric()) << '\n';
            return kExitOk;
        });
    }

    if (split_check->parsed()) {
        return run_guarded([&] {
            const SplitReport report = validate_split(load_corpus(sc_corpus));
            std::cout << "train=" << report.train << " validation=" << report.validation
                      << " test=" << report.test << '\n';
            if (report.clean()) {
                std::cout << "patient-level split: OK\n";
                return kExitOk;
            }
            std::cout << "violations (" << report.violations.size() << "):\n";
            for (const std::string& patient : report.violations) {
                std::cout << "  " << patient << '\n';
            }
            return kExitRuntime;
        });
    }

    return kExitConfig;
}
