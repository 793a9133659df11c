#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "impeval/lexicon.hpp"

namespace impeval {

// One dictionary hit. `start`/`length` are code-point coordinates in the
// original (raw) text, recovered through the normalization origin map.
struct EntityMatch {
    std::string term; // normalized form
    Category category = Category::kGeneral;
    std::size_t start = 0;
    std::size_t length = 0;
    std::size_t norm_length = 0; // length in normalized code points
};

// Greedy longest-match scan: left to right over the normalized text, consume
// the longest dictionary term at each position or advance one code point.
// Matches are non-overlapping and ordered by start.
std::vector<EntityMatch> extract_entities(const Matcher& matcher, std::string_view text);

// Deduplicated normalized terms of a match list (E_ref / E_gen). Multiplicity
// is deliberately discarded: the coverage metrics are set arithmetic.
using EntitySet = std::set<std::string>;

EntitySet entity_set(const std::vector<EntityMatch>& matches);

EntitySet extract_entity_set(const Matcher& matcher, std::string_view text);

} // namespace impeval
