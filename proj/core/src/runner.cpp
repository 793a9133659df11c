#include "impeval/runner.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "impeval/errors.hpp"
#include "impeval/hashing.hpp"

namespace impeval {

using nlohmann::json;

EndpointConfig endpoint_config_from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open endpoint config: " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("endpoint config " + path.string() + ": " + e.what());
    }
    EndpointConfig config;
    if (!doc.contains("model_name") || !doc.contains("base_url")) {
        throw ConfigError("endpoint config needs 'model_name' and 'base_url'");
    }
    config.model_name = doc["model_name"].get<std::string>();
    config.base_url = doc["base_url"].get<std::string>();
    if (doc.contains("api_key_env")) config.api_key_env = doc["api_key_env"].get<std::string>();
    if (doc.contains("request_template"))
        config.request_template = doc["request_template"].get<std::string>();
    if (config.request_template != "chat_completion") {
        throw ConfigError("unsupported request_template '" + config.request_template + "'");
    }
    if (doc.contains("max_retries")) config.max_retries = doc["max_retries"].get<int>();
    if (doc.contains("parallelism")) config.parallelism = doc["parallelism"].get<int>();
    if (doc.contains("timeout_s")) config.timeout_s = doc["timeout_s"].get<double>();
    if (doc.contains("initial_backoff_ms"))
        config.initial_backoff_ms = doc["initial_backoff_ms"].get<int>();
    if (config.parallelism < 1) {
        throw ConfigError("endpoint parallelism must be >= 1");
    }
    if (config.timeout_s <= 0) {
        throw ConfigError("endpoint timeout must be positive");
    }
    return config;
}

std::string render_prompt(const std::string& template_text, const std::string& findings) {
    static constexpr std::string_view kPlaceholder = "{findings}";
    const auto first = template_text.find(kPlaceholder);
    if (first == std::string::npos) {
        throw ConfigError("prompt template is missing the {findings} placeholder");
    }
    if (template_text.find(kPlaceholder, first + kPlaceholder.size()) != std::string::npos) {
        throw ConfigError("prompt template must contain exactly one {findings} placeholder");
    }
    std::string prompt = template_text;
    prompt.replace(first, kPlaceholder.size(), findings);
    return prompt;
}

std::string candidate_cache_key(const std::string& model_name, const std::string& prompt) {
    return sha256_hex(model_name + "\n" + prompt);
}

namespace {

struct ParsedUrl {
    std::string host_part; // scheme://host[:port]
    std::string path_prefix;
};

ParsedUrl split_url(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint base_url must include a scheme: " + base_url);
    }
    const auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {base_url, ""};
    }
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') {
        prefix.pop_back();
    }
    return {base_url.substr(0, path_start), prefix};
}

std::string extract_impression(const std::string& body) {
    json doc;
    try {
        doc = json::parse(body);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed endpoint response: ") + e.what());
    }
    // chat-completion shape: choices[0].message.content
    if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
        const json& first = doc["choices"][0];
        if (first.contains("message") && first["message"].contains("content") &&
            first["message"]["content"].is_string()) {
            return first["message"]["content"].get<std::string>();
        }
    }
    throw ParseError("endpoint response lacks choices[0].message.content");
}

// Write-temp-then-rename so concurrent readers never observe a torn file.
void atomic_write(const std::filesystem::path& path, const std::string& data) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot open cache temp file: " + tmp.string());
        }
        out << data;
        if (!out) {
            throw IoError("write failure on cache temp file: " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

struct CacheRecord {
    std::string impression;
    std::string raw_response;
};

std::optional<CacheRecord> read_cache(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        return std::nullopt;
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception&) {
        return std::nullopt; // treat a corrupt cache entry as a miss
    }
    if (!doc.contains("impression") || !doc["impression"].is_string()) {
        return std::nullopt;
    }
    CacheRecord record;
    record.impression = doc["impression"].get<std::string>();
    if (doc.contains("raw_response") && doc["raw_response"].is_string()) {
        record.raw_response = doc["raw_response"].get<std::string>();
    }
    return record;
}

} // namespace

GenerationResult generate_candidates(const Corpus& corpus, const EndpointConfig& config,
                                     const std::string& template_text,
                                     const std::filesystem::path& cache_dir) {
    if (config.parallelism < 1) {
        throw ConfigError("endpoint parallelism must be >= 1");
    }
    std::filesystem::create_directories(cache_dir);

    std::vector<const Report*> work;
    for (const Report& report : corpus.reports) {
        if (report.split == Split::kTest) {
            work.push_back(&report);
        }
    }

    const ParsedUrl url = split_url(config.base_url);
    std::string api_key;
    if (!config.api_key_env.empty()) {
        if (const char* value = std::getenv(config.api_key_env.c_str())) {
            api_key = value;
        }
    }

    struct Slot {
        std::optional<Candidate> candidate;
        std::optional<SampleError> error;
    };
    std::vector<Slot> slots(work.size());
    std::atomic<std::size_t> next{0};

    auto run_one = [&](httplib::Client& client, std::size_t index) {
        const Report& report = *work[index];
        const std::string prompt = render_prompt(template_text, report.findings);
        const std::string key = candidate_cache_key(config.model_name, prompt);
        const std::filesystem::path cache_file = cache_dir / (key + ".json");

        if (auto cached = read_cache(cache_file)) {
            Candidate candidate;
            candidate.report_id = report.id;
            candidate.model_name = config.model_name;
            candidate.impression = cached->impression;
            candidate.cached = true;
            slots[index].candidate = std::move(candidate);
            return;
        }

        json request;
        request["model"] = config.model_name;
        request["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
        request["temperature"] = 0;
        const std::string body = request.dump();

        std::string failure;
        for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
            if (attempt > 0) {
                const auto delay = std::chrono::milliseconds(
                    static_cast<long long>(config.initial_backoff_ms) << (attempt - 1));
                std::this_thread::sleep_for(delay);
            }
            const auto started = std::chrono::steady_clock::now();
            auto response = client.Post(url.path_prefix + "/chat/completions", body,
                                        "application/json");
            const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - started);
            if (!response) {
                failure = "transport error: " + httplib::to_string(response.error());
                continue;
            }
            if (response->status != 200) {
                failure = "http status " + std::to_string(response->status);
                continue;
            }
            try {
                Candidate candidate;
                candidate.report_id = report.id;
                candidate.model_name = config.model_name;
                candidate.impression = extract_impression(response->body);
                candidate.latency_ms = static_cast<std::uint64_t>(elapsed.count());
                candidate.retries = attempt;

                json cache_doc;
                cache_doc["key"] = key;
                cache_doc["model"] = config.model_name;
                cache_doc["report_id"] = report.id;
                cache_doc["prompt"] = prompt;
                cache_doc["impression"] = candidate.impression;
                cache_doc["latency_ms"] = candidate.latency_ms;
                cache_doc["retries"] = candidate.retries;
                cache_doc["raw_response"] = response->body;
                atomic_write(cache_file, cache_doc.dump());

                slots[index].candidate = std::move(candidate);
                return;
            } catch (const ParseError& e) {
                failure = e.what();
            }
        }
        slots[index].error = SampleError{report.id, config.model_name, failure};
    };

    auto worker = [&] {
        httplib::Client client(url.host_part);
        client.set_connection_timeout(std::chrono::milliseconds(
            static_cast<long long>(config.timeout_s * 1000)));
        client.set_read_timeout(std::chrono::milliseconds(
            static_cast<long long>(config.timeout_s * 1000)));
        if (!api_key.empty()) {
            client.set_default_headers({{"Authorization", "Bearer " + api_key}});
        }
        for (;;) {
            const std::size_t index = next.fetch_add(1);
            if (index >= work.size()) {
                break;
            }
            run_one(client, index);
        }
    };

    const auto thread_count =
        std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), work.size());
    if (thread_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(thread_count);
        for (std::size_t i = 0; i < thread_count; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& thread : pool) {
            thread.join();
        }
    }

    GenerationResult result;
    for (Slot& slot : slots) {
        if (slot.candidate) {
            result.candidates.push_back(std::move(*slot.candidate));
        } else if (slot.error) {
            result.errors.push_back(std::move(*slot.error));
        }
    }
    return result;
}

std::vector<Candidate> load_candidates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open candidates file: " + path.string());
    }
    std::vector<Candidate> candidates;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (!record.contains("id") || !record.contains("model") ||
            !record.contains("impression")) {
            throw ParseError(where + ": candidate needs 'id', 'model', 'impression'");
        }
        Candidate candidate;
        candidate.report_id = record["id"].get<std::string>();
        candidate.model_name = record["model"].get<std::string>();
        candidate.impression = record["impression"].get<std::string>();
        candidates.push_back(std::move(candidate));
    }
    if (in.bad()) {
        throw IoError("read failure on candidates file: " + path.string());
    }
    return candidates;
}

void save_candidates(const std::vector<Candidate>& candidates,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open candidates file for writing: " + path.string());
    }
    for (const Candidate& candidate : candidates) {
        json record;
        record["id"] = candidate.report_id;
        record["model"] = candidate.model_name;
        record["impression"] = candidate.impression;
        out << record.dump() << '\n';
    }
    if (!out) {
        throw IoError("write failure on candidates file: " + path.string());
    }
}

} // namespace impeval
