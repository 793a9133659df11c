#include "impeval/nlg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>

#include "impeval/errors.hpp"
#include "impeval/text_norm.hpp"
#include "impeval/utf8.hpp"

namespace impeval {

std::string_view to_string(TokenScheme scheme) {
    return scheme == TokenScheme::kCharacter ? "character" : "whitespace";
}

std::optional<TokenScheme> scheme_from_string(std::string_view label) {
    if (label == "character") return TokenScheme::kCharacter;
    if (label == "whitespace") return TokenScheme::kWhitespace;
    return std::nullopt;
}

namespace {

bool is_ascii_alnum(char32_t cp) {
    return (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') ||
           (cp >= U'A' && cp <= U'Z');
}

} // namespace

TokenSequence tokenize(std::string_view text, TokenScheme scheme) {
    const std::u32string normalized = normalize_codepoints(utf8::decode(text));
    TokenSequence seq;
    seq.scheme = scheme;

    if (scheme == TokenScheme::kWhitespace) {
        std::string current;
        for (char32_t cp : normalized) {
            if (cp == U' ') {
                if (!current.empty()) {
                    seq.tokens.push_back(std::move(current));
                    current.clear();
                }
            } else {
                utf8::append(current, cp);
            }
        }
        if (!current.empty()) {
            seq.tokens.push_back(std::move(current));
        }
        return seq;
    }

    std::size_t i = 0;
    while (i < normalized.size()) {
        const char32_t cp = normalized[i];
        if (cp == U' ') {
            ++i;
            continue;
        }
        if (is_ascii_alnum(cp)) {
            std::string token;
            utf8::append(token, cp);
            ++i;
            // Extend over alphanumerics; a '.' joins only with an
            // alphanumeric on both sides, so "4.2" is one token.
            while (i < normalized.size()) {
                if (is_ascii_alnum(normalized[i])) {
                    utf8::append(token, normalized[i]);
                    ++i;
                } else if (normalized[i] == U'.' && i + 1 < normalized.size() &&
                           is_ascii_alnum(normalized[i + 1])) {
                    utf8::append(token, normalized[i]);
                    utf8::append(token, normalized[i + 1]);
                    i += 2;
                } else {
                    break;
                }
            }
            seq.tokens.push_back(std::move(token));
            continue;
        }
        std::string token;
        utf8::append(token, cp);
        seq.tokens.push_back(std::move(token));
        ++i;
    }
    return seq;
}

namespace {

// Interns both sequences into small integer ids so the metric inner loops
// compare ints.
struct InternedPair {
    std::vector<std::int32_t> a;
    std::vector<std::int32_t> b;
};

InternedPair intern(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    InternedPair out;
    std::unordered_map<std::string_view, std::int32_t> ids;
    ids.reserve(a.size() + b.size());
    auto id_of = [&](const std::string& token) {
        auto [it, inserted] = ids.emplace(token, static_cast<std::int32_t>(ids.size()));
        return it->second;
    };
    out.a.reserve(a.size());
    for (const auto& token : a) out.a.push_back(id_of(token));
    out.b.reserve(b.size());
    for (const auto& token : b) out.b.push_back(id_of(token));
    return out;
}

} // namespace

double bleu(const TokenSequence& candidate, const TokenSequence& reference, int max_n) {
    if (reference.empty()) {
        throw ArgumentError("bleu: reference must be non-empty");
    }
    if (max_n < 1) {
        throw ArgumentError("bleu: max_n must be >= 1");
    }
    const auto c = candidate.size();
    const auto r = reference.size();
    if (c == 0) {
        return 0.0;
    }

    const auto [cand, ref] = intern(candidate.tokens, reference.tokens);

    double log_sum = 0.0;
    for (int n = 1; n <= max_n; ++n) {
        // n-grams packed as id vectors keyed in an ordered map; counts are
        // clipped against the reference.
        std::map<std::vector<std::int32_t>, std::int64_t> ref_counts;
        if (ref.size() >= static_cast<std::size_t>(n)) {
            for (std::size_t i = 0; i + n <= ref.size(); ++i) {
                ++ref_counts[std::vector<std::int32_t>(ref.begin() + i, ref.begin() + i + n)];
            }
        }
        std::int64_t clipped = 0;
        std::int64_t total = 0;
        if (cand.size() >= static_cast<std::size_t>(n)) {
            std::map<std::vector<std::int32_t>, std::int64_t> cand_counts;
            for (std::size_t i = 0; i + n <= cand.size(); ++i) {
                ++cand_counts[std::vector<std::int32_t>(cand.begin() + i, cand.begin() + i + n)];
            }
            for (const auto& [gram, count] : cand_counts) {
                total += count;
                auto it = ref_counts.find(gram);
                if (it != ref_counts.end()) {
                    clipped += std::min(count, it->second);
                }
            }
        }
        double p = total > 0 ? static_cast<double>(clipped) / static_cast<double>(total) : 0.0;
        if (p == 0.0) {
            p = 1.0 / (2.0 * static_cast<double>(c));
        }
        log_sum += std::log(p);
    }

    const double bp =
        c >= r ? 1.0
               : std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
    return bp * std::exp(log_sum / static_cast<double>(max_n));
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) {
        return 0;
    }
    const auto [x, y] = intern(a, b);
    std::vector<std::size_t> prev(y.size() + 1, 0);
    std::vector<std::size_t> curr(y.size() + 1, 0);
    for (std::size_t i = 1; i <= x.size(); ++i) {
        for (std::size_t j = 1; j <= y.size(); ++j) {
            if (x[i - 1] == y[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    return prev[y.size()];
}

RougeScore rouge_l(const TokenSequence& candidate, const TokenSequence& reference) {
    RougeScore score;
    if (candidate.empty() || reference.empty()) {
        return score;
    }
    const std::size_t lcs = lcs_length(candidate.tokens, reference.tokens);
    if (lcs == 0) {
        return score;
    }
    score.precision = static_cast<double>(lcs) / static_cast<double>(candidate.size());
    score.recall = static_cast<double>(lcs) / static_cast<double>(reference.size());
    // Algebraically 2PR/(P+R); computed over the integer counts directly.
    score.f = 2.0 * static_cast<double>(lcs) /
              static_cast<double>(candidate.size() + reference.size());
    return score;
}

namespace {

// Longest common substring of the unconsumed portions; ties resolve to the
// earliest candidate start, then the earliest reference start.
struct CommonBlock {
    std::size_t cand_start = 0;
    std::size_t ref_start = 0;
    std::size_t length = 0;
};

CommonBlock longest_common_block(const std::vector<std::int32_t>& cand,
                                 const std::vector<std::int32_t>& ref,
                                 const std::vector<bool>& cand_used,
                                 const std::vector<bool>& ref_used) {
    CommonBlock best;
    // lengths[j] = longest usable suffix match ending at cand[i-1], ref[j-1].
    std::vector<std::size_t> prev(ref.size() + 1, 0);
    std::vector<std::size_t> curr(ref.size() + 1, 0);
    for (std::size_t i = 1; i <= cand.size(); ++i) {
        for (std::size_t j = 1; j <= ref.size(); ++j) {
            if (!cand_used[i - 1] && !ref_used[j - 1] && cand[i - 1] == ref[j - 1]) {
                curr[j] = prev[j - 1] + 1;
                const std::size_t len = curr[j];
                const std::size_t cs = i - len;
                const std::size_t rs = j - len;
                if (len > best.length ||
                    (len == best.length && len > 0 &&
                     (cs < best.cand_start ||
                      (cs == best.cand_start && rs < best.ref_start)))) {
                    best = {cs, rs, len};
                }
            } else {
                curr[j] = 0;
            }
        }
        std::swap(prev, curr);
    }
    return best;
}

} // namespace

MeteorAlignment meteor_alignment(const TokenSequence& candidate,
                                 const TokenSequence& reference) {
    MeteorAlignment alignment;
    if (candidate.empty() || reference.empty()) {
        return alignment;
    }
    const auto [cand, ref] = intern(candidate.tokens, reference.tokens);

    // Maximal-munch alignment: repeatedly take the longest common block of
    // unconsumed tokens. Each pass consumes equal counts from both sides, so
    // the total matched count equals sum_t min(count_c(t), count_r(t)) — the
    // maximum matching — while long blocks keep the chunk count low.
    std::vector<bool> cand_used(cand.size(), false);
    std::vector<bool> ref_used(ref.size(), false);
    for (;;) {
        const CommonBlock block = longest_common_block(cand, ref, cand_used, ref_used);
        if (block.length == 0) {
            break;
        }
        for (std::size_t k = 0; k < block.length; ++k) {
            cand_used[block.cand_start + k] = true;
            ref_used[block.ref_start + k] = true;
        }
        alignment.matches += block.length;
        ++alignment.chunks;
    }
    return alignment;
}

double meteor_lite(const TokenSequence& candidate, const TokenSequence& reference) {
    const MeteorAlignment alignment = meteor_alignment(candidate, reference);
    if (alignment.matches == 0) {
        return 0.0;
    }
    const double m = static_cast<double>(alignment.matches);
    const double precision = m / static_cast<double>(candidate.size());
    const double recall = m / static_cast<double>(reference.size());
    const double f_mean = 10.0 * precision * recall / (recall + 9.0 * precision);
    const double frag = static_cast<double>(alignment.chunks) / m;
    const double penalty = 0.5 * frag * frag * frag;
    return f_mean * (1.0 - penalty);
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

double norm(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

// Cosine with zero-vector guard: a zero token vector has no direction, so
// its similarity to anything is 0.
double cosine_or_zero(const std::vector<double>& a, const std::vector<double>& b) {
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

} // namespace

BertScore bertscore_from_embeddings(const std::vector<std::vector<double>>& candidate_tokens,
                                    const std::vector<std::vector<double>>& reference_tokens) {
    if (candidate_tokens.empty() || reference_tokens.empty()) {
        throw ArgumentError("bertscore: both token vector lists must be non-empty");
    }
    const std::size_t dim = candidate_tokens.front().size();
    for (const auto& v : candidate_tokens) {
        if (v.size() != dim) throw ArgumentError("bertscore: ragged candidate vectors");
    }
    for (const auto& v : reference_tokens) {
        if (v.size() != dim) throw ArgumentError("bertscore: dimension mismatch");
    }

    double precision_sum = 0.0;
    for (const auto& cv : candidate_tokens) {
        double best = -1.0;
        for (const auto& rv : reference_tokens) {
            best = std::max(best, cosine_or_zero(cv, rv));
        }
        precision_sum += best;
    }
    double recall_sum = 0.0;
    for (const auto& rv : reference_tokens) {
        double best = -1.0;
        for (const auto& cv : candidate_tokens) {
            best = std::max(best, cosine_or_zero(cv, rv));
        }
        recall_sum += best;
    }

    BertScore score;
    score.precision = precision_sum / static_cast<double>(candidate_tokens.size());
    score.recall = recall_sum / static_cast<double>(reference_tokens.size());
    const double denom = score.precision + score.recall;
    score.f = denom == 0.0 ? 0.0 : 2.0 * score.precision * score.recall / denom;
    return score;
}

double sentence_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw ArgumentError("sentence_cosine: dimension mismatch");
    }
    const double na = norm(a);
    const double nb = norm(b);
    if (na == 0.0 || nb == 0.0) {
        throw ArgumentError("sentence_cosine: zero vector");
    }
    return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

} // namespace impeval
