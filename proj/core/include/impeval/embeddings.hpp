#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace impeval {

// Externally produced vectors for one text. All token vectors and the
// sentence vector share one dimension.
struct EmbeddingBundle {
    std::vector<std::vector<double>> token_vectors;
    std::vector<double> sentence_vector;
};

enum class EmbeddingSide { kCandidate, kReference };

// Lookup table for embedding bundles keyed by sample id and side. Candidate
// entries may additionally carry a model name; lookups prefer the exact
// (id, model) entry and fall back to the model-agnostic one.
class EmbeddingStore {
public:
    void put(const std::string& id, EmbeddingSide side, const std::string& model,
             EmbeddingBundle bundle);

    const EmbeddingBundle* find(const std::string& id, EmbeddingSide side,
                                const std::string& model) const;

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

private:
    // key: (id, side, model); model "" = any model
    std::map<std::tuple<std::string, int, std::string>, EmbeddingBundle> entries_;
};

// JSONL, one bundle per line:
//   {"id": str, "side": "candidate"|"reference",
//    "token_vectors": [[f64]], "sentence_vector": [f64], "model": str?}
EmbeddingStore load_embeddings(const std::filesystem::path& path);

} // namespace impeval
