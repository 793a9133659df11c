#include "impeval/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "impeval/errors.hpp"
#include "impeval/text_norm.hpp"
#include "impeval/utf8.hpp"

namespace impeval {

std::string_view to_string(Category category) {
    switch (category) {
    case Category::kAnatomy:
        return "anatomy";
    case Category::kTracer:
        return "tracer";
    case Category::kPathology:
        return "pathology";
    case Category::kGeneral:
        return "general";
    }
    return "general";
}

std::optional<Category> category_from_string(std::string_view label) {
    if (label == "anatomy") return Category::kAnatomy;
    if (label == "tracer") return Category::kTracer;
    if (label == "pathology") return Category::kPathology;
    if (label == "general") return Category::kGeneral;
    return std::nullopt;
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// First-seen category wins; later duplicates are dropped.
Lexicon finalize(std::vector<std::pair<std::string, Category>>&& raw,
                 std::vector<std::string>&& sources) {
    std::map<std::string, Category> merged;
    for (auto& [term, category] : raw) {
        merged.emplace(std::move(term), category);
    }
    Lexicon lexicon;
    lexicon.source_files = std::move(sources);
    lexicon.terms.reserve(merged.size());
    for (auto& [term, category] : merged) {
        lexicon.terms.push_back(LexiconEntry{term, category});
    }
    return lexicon;
}

} // namespace

Lexicon lexicon_from_terms(const std::vector<std::pair<std::string, Category>>& terms) {
    std::vector<std::pair<std::string, Category>> normalized;
    normalized.reserve(terms.size());
    for (const auto& [term, category] : terms) {
        std::string norm = normalize_text(trim(term));
        if (norm.empty()) {
            continue;
        }
        normalized.emplace_back(std::move(norm), category);
    }
    Lexicon lexicon = finalize(std::move(normalized), {"<memory>"});
    if (lexicon.empty()) {
        throw ValidationError("lexicon is empty after normalization");
    }
    return lexicon;
}

Lexicon load_lexicon(const std::vector<std::filesystem::path>& paths) {
    std::vector<std::pair<std::string, Category>> raw;
    std::vector<std::string> sources;
    for (const auto& path : paths) {
        std::ifstream in(path);
        if (!in) {
            throw IoError("cannot open lexicon file: " + path.string());
        }
        sources.push_back(path.string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            std::string_view content = line;
            if (line_no == 1 && content.starts_with("\xEF\xBB\xBF")) {
                content.remove_prefix(3); // UTF-8 BOM
            }
            std::string_view entry = trim(content);
            if (entry.empty() || entry.front() == '#') {
                continue;
            }
            Category category = Category::kGeneral;
            std::string_view term_field = entry;
            if (const auto tab = entry.find('\t'); tab != std::string_view::npos) {
                term_field = trim(entry.substr(0, tab));
                const std::string_view tag = trim(entry.substr(tab + 1));
                if (!tag.empty()) {
                    auto parsed = category_from_string(tag);
                    if (!parsed) {
                        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                         ": unknown category '" + std::string(tag) + "'");
                    }
                    category = *parsed;
                }
            }
            std::string norm = normalize_text(term_field);
            if (norm.empty()) {
                continue;
            }
            raw.emplace_back(std::move(norm), category);
        }
        if (in.bad()) {
            throw IoError("read failure on lexicon file: " + path.string());
        }
    }
    Lexicon lexicon = finalize(std::move(raw), std::move(sources));
    if (lexicon.empty()) {
        throw ValidationError("merged lexicon is empty");
    }
    return lexicon;
}

void save_lexicon(const Lexicon& lexicon, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open lexicon file for writing: " + path.string());
    }
    for (const LexiconEntry& entry : lexicon.terms) {
        out << entry.term << '\t' << to_string(entry.category) << '\n';
    }
    if (!out) {
        throw IoError("write failure on lexicon file: " + path.string());
    }
}

std::uint32_t Matcher::child(std::uint32_t node, char32_t cp) const {
    const auto& edges = nodes_[node].edges;
    auto it = std::lower_bound(edges.begin(), edges.end(), cp,
                               [](const auto& edge, char32_t key) { return edge.first < key; });
    if (it == edges.end() || it->first != cp) {
        return 0; // node 0 is the root; no term starts with an empty edge walk
    }
    return it->second;
}

std::optional<Matcher::Hit> Matcher::longest_match(std::u32string_view text,
                                                   std::size_t pos) const {
    if (pos >= text.size()) {
        return std::nullopt;
    }
    std::uint32_t node = 0;
    std::int32_t best_term = -1;
    for (std::size_t i = pos; i < text.size(); ++i) {
        const std::uint32_t next = child(node, text[i]);
        if (next == 0) {
            break;
        }
        node = next;
        if (nodes_[node].term_id >= 0) {
            best_term = nodes_[node].term_id;
        }
    }
    if (best_term < 0) {
        return std::nullopt;
    }
    const TermRecord& record = terms_[static_cast<std::size_t>(best_term)];
    return Hit{record.utf8, record.category, record.length};
}

std::optional<Matcher::Hit> Matcher::longest_match_raw(std::string_view raw,
                                                       std::size_t pos) const {
    const std::u32string normalized = normalize_codepoints(utf8::decode(raw));
    return longest_match(normalized, pos);
}

bool Matcher::has_category(Category category) const {
    return category_present_[static_cast<int>(category)];
}

Matcher build_matcher(const Lexicon& lexicon) {
    if (lexicon.empty()) {
        throw ValidationError("cannot build matcher from empty lexicon");
    }
    Matcher matcher;
    matcher.nodes_.emplace_back(); // root
    matcher.terms_.reserve(lexicon.size());
    // Lexicon terms are sorted and unique, so insertion order (and therefore
    // the trie layout) depends only on the term set.
    for (const LexiconEntry& entry : lexicon.terms) {
        const std::u32string cps = utf8::decode(entry.term);
        std::uint32_t node = 0;
        for (char32_t cp : cps) {
            auto& edges = matcher.nodes_[node].edges;
            auto it = std::lower_bound(
                edges.begin(), edges.end(), cp,
                [](const auto& edge, char32_t key) { return edge.first < key; });
            if (it != edges.end() && it->first == cp) {
                node = it->second;
            } else {
                const auto next = static_cast<std::uint32_t>(matcher.nodes_.size());
                // Insert before growing nodes_: the edges reference may dangle
                // after reallocation otherwise.
                edges.insert(it, {cp, next});
                matcher.nodes_.emplace_back();
                node = next;
            }
        }
        matcher.nodes_[node].term_id = static_cast<std::int32_t>(matcher.terms_.size());
        matcher.terms_.push_back({entry.term, cps.size(), entry.category});
        matcher.category_present_[static_cast<int>(entry.category)] = true;
    }
    return matcher;
}

} // namespace impeval
