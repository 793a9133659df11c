#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "impeval/extraction.hpp"
#include "impeval/lexicon.hpp"

namespace impeval {

// Entity Coverage Rate: |E_ref ∩ E_gen| / |E_ref|. An empty reference set
// yields 1.0 — nothing was omitted.
double ecr(const EntitySet& e_ref, const EntitySet& e_gen);

// Unsupported Entity Rate: |E_gen \ E_ref| / |E_gen|. An empty generated set
// yields 0.0 — nothing was fabricated.
double uer(const EntitySet& e_ref, const EntitySet& e_gen);

enum class CriterionKind {
    kNumberedSectioning,
    kAnatomicalMarkers,
    kTerminologyDensity,
    kLengthBounds,
    kBoilerplateAbsence,
};

std::string_view to_string(CriterionKind kind);

struct Criterion {
    CriterionKind kind = CriterionKind::kNumberedSectioning;
    std::map<std::string, double> params; // kind-specific thresholds
};

// Ordered structural criteria; the shipped default has five entries. Every
// threshold is configurable because institutions differ.
struct Rubric {
    std::vector<Criterion> criteria;
    std::vector<std::string> boilerplate_denylist;

    std::size_t size() const { return criteria.size(); }
};

Rubric default_rubric();

// JSON schema: {"criteria": [{"kind": str, "params": {...}}],
//               "boilerplate_denylist": [str]}
Rubric load_rubric(const std::filesystem::path& path);
Rubric rubric_from_json_text(std::string_view text);
std::string rubric_to_json(const Rubric& rubric);

// Rule-based compliance score in {0, 0.5, 1}. Empty or whitespace-only text
// scores 0 on every criterion. Throws ConfigError for an unknown parameter
// set.
double score_criterion(std::string_view text, const Criterion& criterion,
                       const Matcher& matcher, const Rubric& rubric);

// Format Compliance Rate: the mean of the per-criterion scores, which are
// also returned. Throws ConfigError on an empty rubric.
std::pair<double, std::vector<double>> fcr(std::string_view text, const Rubric& rubric,
                                           const Matcher& matcher);

} // namespace impeval
