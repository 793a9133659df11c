#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace impeval {

enum class Category { kAnatomy, kTracer, kPathology, kGeneral };

std::string_view to_string(Category category);
std::optional<Category> category_from_string(std::string_view label);

struct LexiconEntry {
    std::string term; // normalized form, equal to normalize_text(term)
    Category category = Category::kGeneral;
};

// Normalized, deduplicated term dictionary. Entries are sorted by term and
// the first-seen category wins when sources disagree.
struct Lexicon {
    std::vector<LexiconEntry> terms;
    std::vector<std::string> source_files;

    bool empty() const { return terms.empty(); }
    std::size_t size() const { return terms.size(); }
};

// Reads term files (one `term[<TAB>category]` entry per line, `#` comments
// and blank lines ignored) and merges them. Throws IoError for unreadable
// files, ParseError for bad category tags, ValidationError if the merged
// lexicon ends up empty.
Lexicon load_lexicon(const std::vector<std::filesystem::path>& paths);

// Builds a lexicon from in-memory (term, category) pairs; same normalization
// and merge rules as load_lexicon.
Lexicon lexicon_from_terms(const std::vector<std::pair<std::string, Category>>& terms);

void save_lexicon(const Lexicon& lexicon, const std::filesystem::path& path);

// Compiled longest-match automaton over normalized code points. Immutable
// after construction; queries are const and thread-safe.
class Matcher {
public:
    struct Hit {
        std::string_view term;   // normalized UTF-8 form
        Category category;
        std::size_t length;      // match length in normalized code points
    };

    // Longest dictionary term that is a prefix of text[pos..]. `text` must
    // already be in normalized form.
    std::optional<Hit> longest_match(std::u32string_view text, std::size_t pos) const;

    // Convenience for diagnostics: normalizes `raw` and matches at the given
    // normalized position.
    std::optional<Hit> longest_match_raw(std::string_view raw, std::size_t pos) const;

    std::size_t term_count() const { return terms_.size(); }
    bool has_category(Category category) const;

private:
    friend Matcher build_matcher(const Lexicon& lexicon);

    struct Node {
        // Sorted (code point, child index) pairs; binary-searched on lookup.
        std::vector<std::pair<char32_t, std::uint32_t>> edges;
        std::int32_t term_id = -1;
    };

    std::uint32_t child(std::uint32_t node, char32_t cp) const;

    std::vector<Node> nodes_;
    struct TermRecord {
        std::string utf8;
        std::size_t length; // in code points
        Category category;
    };
    std::vector<TermRecord> terms_;
    bool category_present_[4] = {false, false, false, false};
};

// Throws ValidationError for an empty lexicon. A pure function of the
// normalized term set.
Matcher build_matcher(const Lexicon& lexicon);

} // namespace impeval
