#include "impeval/extraction.hpp"

#include "impeval/text_norm.hpp"

namespace impeval {

std::vector<EntityMatch> extract_entities(const Matcher& matcher, std::string_view text) {
    const NormalizedText normalized = normalize_with_origin(text);
    std::vector<EntityMatch> matches;
    std::size_t i = 0;
    while (i < normalized.text.size()) {
        const auto hit = matcher.longest_match(normalized.text, i);
        if (!hit) {
            ++i;
            continue;
        }
        const std::size_t first = normalized.origin[i];
        const std::size_t last = normalized.origin[i + hit->length - 1];
        matches.push_back(EntityMatch{std::string(hit->term), hit->category, first,
                                      last - first + 1, hit->length});
        i += hit->length;
    }
    return matches;
}

EntitySet entity_set(const std::vector<EntityMatch>& matches) {
    EntitySet set;
    for (const EntityMatch& match : matches) {
        set.insert(match.term);
    }
    return set;
}

EntitySet extract_entity_set(const Matcher& matcher, std::string_view text) {
    return entity_set(extract_entities(matcher, text));
}

} // namespace impeval
