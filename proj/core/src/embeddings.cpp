#include "impeval/embeddings.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "impeval/errors.hpp"

namespace impeval {

using nlohmann::json;

void EmbeddingStore::put(const std::string& id, EmbeddingSide side,
                         const std::string& model, EmbeddingBundle bundle) {
    entries_[{id, static_cast<int>(side), model}] = std::move(bundle);
}

const EmbeddingBundle* EmbeddingStore::find(const std::string& id, EmbeddingSide side,
                                            const std::string& model) const {
    if (!model.empty()) {
        auto it = entries_.find({id, static_cast<int>(side), model});
        if (it != entries_.end()) {
            return &it->second;
        }
    }
    auto it = entries_.find({id, static_cast<int>(side), std::string()});
    return it == entries_.end() ? nullptr : &it->second;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open embeddings file: " + path.string());
    }
    EmbeddingStore store;
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
        if (!record.is_object() || !record.contains("id") || !record.contains("side")) {
            throw ParseError(where + ": embedding record needs 'id' and 'side'");
        }
        const std::string side_label = record["side"].get<std::string>();
        EmbeddingSide side;
        if (side_label == "candidate") {
            side = EmbeddingSide::kCandidate;
        } else if (side_label == "reference") {
            side = EmbeddingSide::kReference;
        } else {
            throw ParseError(where + ": unknown side '" + side_label + "'");
        }

        EmbeddingBundle bundle;
        if (record.contains("token_vectors")) {
            for (const json& vec : record["token_vectors"]) {
                bundle.token_vectors.push_back(vec.get<std::vector<double>>());
            }
        }
        if (record.contains("sentence_vector")) {
            bundle.sentence_vector = record["sentence_vector"].get<std::vector<double>>();
        }
        const std::size_t dim = bundle.sentence_vector.size();
        for (const auto& vec : bundle.token_vectors) {
            if (dim != 0 && !vec.empty() && vec.size() != dim) {
                throw ParseError(where + ": token vector dimension differs from sentence vector");
            }
        }
        std::string model;
        if (record.contains("model") && record["model"].is_string()) {
            model = record["model"].get<std::string>();
        }
        store.put(record["id"].get<std::string>(), side, model, std::move(bundle));
    }
    if (in.bad()) {
        throw IoError("read failure on embeddings file: " + path.string());
    }
    return store;
}

} // namespace impeval
