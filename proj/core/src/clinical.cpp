#include "impeval/clinical.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "impeval/errors.hpp"
#include "impeval/text_norm.hpp"
#include "impeval/utf8.hpp"

namespace impeval {

using nlohmann::json;

double ecr(const EntitySet& e_ref, const EntitySet& e_gen) {
    if (e_ref.empty()) {
        return 1.0;
    }
    std::size_t covered = 0;
    for (const std::string& entity : e_ref) {
        covered += e_gen.count(entity);
    }
    return static_cast<double>(covered) / static_cast<double>(e_ref.size());
}

double uer(const EntitySet& e_ref, const EntitySet& e_gen) {
    if (e_gen.empty()) {
        return 0.0;
    }
    std::size_t unsupported = 0;
    for (const std::string& entity : e_gen) {
        unsupported += e_ref.count(entity) == 0 ? 1 : 0;
    }
    return static_cast<double>(unsupported) / static_cast<double>(e_gen.size());
}

std::string_view to_string(CriterionKind kind) {
    switch (kind) {
    case CriterionKind::kNumberedSectioning:
        return "numbered_sectioning";
    case CriterionKind::kAnatomicalMarkers:
        return "anatomical_markers";
    case CriterionKind::kTerminologyDensity:
        return "terminology_density";
    case CriterionKind::kLengthBounds:
        return "length_bounds";
    case CriterionKind::kBoilerplateAbsence:
        return "boilerplate_absence";
    }
    return "numbered_sectioning";
}

namespace {

std::optional<CriterionKind> kind_from_string(std::string_view label) {
    if (label == "numbered_sectioning") return CriterionKind::kNumberedSectioning;
    if (label == "anatomical_markers") return CriterionKind::kAnatomicalMarkers;
    if (label == "terminology_density") return CriterionKind::kTerminologyDensity;
    if (label == "length_bounds") return CriterionKind::kLengthBounds;
    if (label == "boilerplate_absence") return CriterionKind::kBoilerplateAbsence;
    return std::nullopt;
}

double param(const Criterion& criterion, const std::string& key, double fallback) {
    auto it = criterion.params.find(key);
    return it == criterion.params.end() ? fallback : it->second;
}

bool is_ascii_digit(char32_t cp) { return cp >= U'0' && cp <= U'9'; }
bool is_fullwidth_digit(char32_t cp) { return cp >= 0xFF10 && cp <= 0xFF19; }
bool is_digit(char32_t cp) { return is_ascii_digit(cp) || is_fullwidth_digit(cp); }

bool is_clause_delimiter(char32_t cp) {
    switch (cp) {
    case U'\n':
    case 0x3002: // 。
    case 0xFF1B: // ；
    case U';':
    case U'!':
    case 0xFF01: // ！
    case U'?':
    case 0xFF1F: // ？
    case 0x2026: // …
    case U'.':
    case 0xFF0E: // ．
        return true;
    default:
        return false;
    }
}

enum class MarkerFamily { kNone, kDot, kPause, kParen, kCircled };

// Recognizes one enumeration marker at `i`. Families:
//   dot     "1." / "１．"
//   pause   "1、"
//   paren   "(1)" / "（1）" / "1)"
//   circled "①" .. "⑳"
MarkerFamily match_marker(const std::u32string& text, std::size_t i) {
    const char32_t first = text[i];
    if (first >= 0x2460 && first <= 0x2473) {
        return MarkerFamily::kCircled;
    }
    if (first == U'(' || first == 0xFF08) {
        std::size_t j = i + 1;
        std::size_t digits = 0;
        while (j < text.size() && is_digit(text[j])) {
            ++j;
            ++digits;
        }
        if (digits > 0 && j < text.size() && (text[j] == U')' || text[j] == 0xFF09)) {
            return MarkerFamily::kParen;
        }
        return MarkerFamily::kNone;
    }
    if (is_digit(first)) {
        std::size_t j = i;
        while (j < text.size() && is_digit(text[j])) {
            ++j;
        }
        if (j < text.size()) {
            const char32_t sep = text[j];
            if (sep == U'.' || sep == 0xFF0E) return MarkerFamily::kDot;
            if (sep == 0x3001) return MarkerFamily::kPause; // 、
            if (sep == U')' || sep == 0xFF09) return MarkerFamily::kParen;
        }
    }
    return MarkerFamily::kNone;
}

double score_numbered_sectioning(const std::u32string& text, const Criterion& criterion) {
    const auto min_markers = static_cast<std::size_t>(param(criterion, "min_markers", 2));
    std::array<std::size_t, 5> family_counts{};
    bool at_clause_start = true;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char32_t cp = text[i];
        if (at_clause_start && !is_space(fold_width(cp))) {
            const MarkerFamily family = match_marker(text, i);
            if (family != MarkerFamily::kNone) {
                ++family_counts[static_cast<std::size_t>(family)];
            }
            at_clause_start = false;
        }
        if (is_clause_delimiter(cp)) {
            at_clause_start = true;
        }
    }
    std::size_t best = 0;
    std::size_t total = 0;
    for (std::size_t f = 1; f < family_counts.size(); ++f) {
        best = std::max(best, family_counts[f]);
        total += family_counts[f];
    }
    if (best >= min_markers) return 1.0;
    if (total == 1) return 0.5;
    return 0.0;
}

double score_anatomical_markers(const std::vector<EntityMatch>& matches,
                                const Criterion& criterion) {
    const auto min_distinct = static_cast<std::size_t>(param(criterion, "min_distinct", 2));
    std::set<std::string_view> anatomy;
    for (const EntityMatch& match : matches) {
        if (match.category == Category::kAnatomy) {
            anatomy.insert(match.term);
        }
    }
    if (anatomy.size() >= min_distinct) return 1.0;
    if (anatomy.size() == 1) return 0.5;
    return 0.0;
}

double score_terminology_density(const std::u32string& text,
                                 const std::vector<EntityMatch>& matches,
                                 const Criterion& criterion) {
    const double full = param(criterion, "full", 0.25);
    const double partial = param(criterion, "partial", 0.10);
    std::size_t non_ws = 0;
    for (char32_t cp : text) {
        if (!is_space(fold_width(cp))) {
            ++non_ws;
        }
    }
    if (non_ws == 0) {
        return 0.0;
    }
    // Count non-whitespace characters inside matched spans so multi-word
    // terms do not credit their internal spaces.
    std::size_t covered = 0;
    for (const EntityMatch& match : matches) {
        const std::size_t end = std::min(match.start + match.length, text.size());
        for (std::size_t i = match.start; i < end; ++i) {
            if (!is_space(fold_width(text[i]))) {
                ++covered;
            }
        }
    }
    const double density = static_cast<double>(covered) / static_cast<double>(non_ws);
    if (density >= full) return 1.0;
    if (density >= partial) return 0.5;
    return 0.0;
}

double score_length_bounds(const std::u32string& text, const Criterion& criterion) {
    const double full_min = param(criterion, "full_min", 60);
    const double full_max = param(criterion, "full_max", 720);
    const double partial_min = param(criterion, "partial_min", 20);
    const double partial_max = param(criterion, "partial_max", 1500);
    const auto n = static_cast<double>(text.size());
    if (n >= full_min && n <= full_max) return 1.0;
    if (n >= partial_min && n <= partial_max) return 0.5;
    return 0.0;
}

double score_boilerplate_absence(std::string_view text, const Rubric& rubric) {
    const std::string haystack = normalize_text(text);
    for (const std::string& phrase : rubric.boilerplate_denylist) {
        const std::string needle = normalize_text(phrase);
        if (!needle.empty() && haystack.find(needle) != std::string::npos) {
            return 0.0;
        }
    }
    return 1.0;
}

bool whitespace_only_u32(const std::u32string& text) {
    return std::all_of(text.begin(), text.end(),
                       [](char32_t cp) { return is_space(fold_width(cp)); });
}

} // namespace

double score_criterion(std::string_view text, const Criterion& criterion,
                       const Matcher& matcher, const Rubric& rubric) {
    const std::u32string raw = utf8::decode(text);
    if (whitespace_only_u32(raw)) {
        return 0.0; // degenerate input scores 0 on every criterion
    }
    switch (criterion.kind) {
    case CriterionKind::kNumberedSectioning:
        return score_numbered_sectioning(raw, criterion);
    case CriterionKind::kAnatomicalMarkers:
        return score_anatomical_markers(extract_entities(matcher, text), criterion);
    case CriterionKind::kTerminologyDensity:
        return score_terminology_density(raw, extract_entities(matcher, text), criterion);
    case CriterionKind::kLengthBounds:
        return score_length_bounds(raw, criterion);
    case CriterionKind::kBoilerplateAbsence:
        return score_boilerplate_absence(text, rubric);
    }
    throw ConfigError("unknown criterion kind");
}

std::pair<double, std::vector<double>> fcr(std::string_view text, const Rubric& rubric,
                                           const Matcher& matcher) {
    if (rubric.criteria.empty()) {
        throw ConfigError("rubric has no criteria");
    }
    std::vector<double> scores;
    scores.reserve(rubric.criteria.size());
    for (const Criterion& criterion : rubric.criteria) {
        scores.push_back(score_criterion(text, criterion, matcher, rubric));
    }
    const double sum = std::accumulate(scores.begin(), scores.end(), 0.0);
    return {sum / static_cast<double>(scores.size()), std::move(scores)};
}

Rubric default_rubric() {
    Rubric rubric;
    rubric.criteria = {
        Criterion{CriterionKind::kNumberedSectioning, {{"min_markers", 2}}},
        Criterion{CriterionKind::kAnatomicalMarkers, {{"min_distinct", 2}}},
        Criterion{CriterionKind::kTerminologyDensity, {{"full", 0.25}, {"partial", 0.10}}},
        Criterion{CriterionKind::kLengthBounds,
                  {{"full_min", 60}, {"full_max", 720}, {"partial_min", 20}, {"partial_max", 1500}}},
        Criterion{CriterionKind::kBoilerplateAbsence, {}},
    };
    rubric.boilerplate_denylist = {
        "as an ai",
        "as a language model",
        "i cannot provide",
        "i am unable to",
        "here is the impression",
        "please consult a medical professional",
        "作为人工智能",
        "作为一个语言模型",
        "我无法提供",
        "很抱歉",
        "仅供参考，请咨询",
        "以下是印象",
    };
    return rubric;
}

Rubric rubric_from_json_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("rubric JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("criteria") || !doc["criteria"].is_array()) {
        throw ConfigError("rubric JSON must contain a 'criteria' array");
    }
    Rubric rubric;
    for (const json& item : doc["criteria"]) {
        if (!item.is_object() || !item.contains("kind") || !item["kind"].is_string()) {
            throw ConfigError("each rubric criterion needs a string 'kind'");
        }
        const std::string label = item["kind"].get<std::string>();
        auto kind = kind_from_string(label);
        if (!kind) {
            throw ConfigError("unknown criterion kind '" + label + "'");
        }
        Criterion criterion;
        criterion.kind = *kind;
        if (item.contains("params")) {
            if (!item["params"].is_object()) {
                throw ConfigError("criterion 'params' must be an object");
            }
            for (const auto& [key, value] : item["params"].items()) {
                if (!value.is_number()) {
                    throw ConfigError("criterion parameter '" + key + "' must be numeric");
                }
                criterion.params[key] = value.get<double>();
            }
        }
        rubric.criteria.push_back(std::move(criterion));
    }
    if (rubric.criteria.empty()) {
        throw ConfigError("rubric 'criteria' array is empty");
    }
    if (doc.contains("boilerplate_denylist")) {
        if (!doc["boilerplate_denylist"].is_array()) {
            throw ConfigError("'boilerplate_denylist' must be an array of strings");
        }
        for (const json& phrase : doc["boilerplate_denylist"]) {
            if (!phrase.is_string()) {
                throw ConfigError("'boilerplate_denylist' must be an array of strings");
            }
            rubric.boilerplate_denylist.push_back(phrase.get<std::string>());
        }
    }
    return rubric;
}

Rubric load_rubric(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open rubric file: " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return rubric_from_json_text(buffer.str());
}

std::string rubric_to_json(const Rubric& rubric) {
    json criteria = json::array();
    for (const Criterion& criterion : rubric.criteria) {
        json params = json::object();
        for (const auto& [key, value] : criterion.params) {
            params[key] = value;
        }
        criteria.push_back({{"kind", std::string(to_string(criterion.kind))},
                            {"params", params}});
    }
    json doc;
    doc["criteria"] = criteria;
    doc["boilerplate_denylist"] = rubric.boilerplate_denylist;
    return doc.dump(2);
}

} // namespace impeval
