#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace impeval {

enum class TokenScheme { kCharacter, kWhitespace };

std::string_view to_string(TokenScheme scheme);
std::optional<TokenScheme> scheme_from_string(std::string_view label);

struct TokenSequence {
    std::vector<std::string> tokens;
    TokenScheme scheme = TokenScheme::kCharacter;

    std::size_t size() const { return tokens.size(); }
    bool empty() const { return tokens.empty(); }
};

// Normalizes, then splits. The character scheme emits one token per
// non-whitespace code point except that runs of ASCII alphanumerics (with
// interior decimal points) group into one token: "suvmax" and "4.2" are
// single tokens while CJK splits per character.
TokenSequence tokenize(std::string_view text, TokenScheme scheme);

// Sentence-level BLEU with modified n-gram precision, the standard brevity
// penalty, and zero-precision smoothing p_n -> 1/(2|candidate|). An empty
// candidate scores 0; an empty reference is an ArgumentError.
double bleu(const TokenSequence& candidate, const TokenSequence& reference, int max_n = 4);

struct RougeScore {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

// LCS-based ROUGE-L. All zeros when either sequence is empty or the LCS is.
RougeScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference);

// Exact-match METEOR: unigram alignment maximizing matches with a
// chunk-minimizing heuristic, F_mean = 10PR/(R+9P), fragmentation penalty
// 0.5*(chunks/m)^3.
double meteor_lite(const TokenSequence& candidate, const TokenSequence& reference);

// The alignment behind meteor_lite. `matches` always equals the maximum
// one-to-one exact matching, sum over tokens of min(count_cand, count_ref);
// `chunks` is the number of contiguous aligned blocks the greedy
// maximal-munch pass settles on.
struct MeteorAlignment {
    std::size_t matches = 0;
    std::size_t chunks = 0;
};

MeteorAlignment meteor_alignment(const TokenSequence& candidate,
                                 const TokenSequence& reference);

// Longest common subsequence length (exposed for the scorer and its tests).
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct BertScore {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

// Greedy max-cosine token matching over externally produced embeddings, no
// IDF weighting. Throws ArgumentError on empty bundles or dimension
// mismatch.
BertScore bertscore_from_embeddings(const std::vector<std::vector<double>>& candidate_tokens,
                                    const std::vector<std::vector<double>>& reference_tokens);

// Cosine similarity clamped to [-1, 1]. Throws ArgumentError for zero
// vectors or mismatched dimensions.
double sentence_cosine(const std::vector<double>& a, const std::vector<double>& b);

} // namespace impeval
