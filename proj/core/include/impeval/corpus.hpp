#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace impeval {

enum class Split { kTrain, kValidation, kTest };

std::string_view to_string(Split split);
std::optional<Split> split_from_string(std::string_view label);

// One findings -> impression record. `tracer` is the stratification tag;
// records without one carry "unknown".
struct Report {
    std::string id;
    std::string patient_id;
    std::string tracer;
    std::string findings;
    std::string impression;
    Split split = Split::kTrain;
};

// Immutable once loaded; iteration order equals file order.
struct Corpus {
    std::vector<Report> reports;
    std::string source_path;
};

// Per-split cardinalities plus every patient id that appears in more than
// one split (sorted lexicographically). Empty `violations` means the split
// is patient-level disjoint.
struct SplitReport {
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;
    std::vector<std::string> violations;

    bool clean() const { return violations.empty(); }
};

// Reads a JSONL corpus file, one report object per line. Unknown keys are
// ignored; a missing tracer defaults to "unknown". Throws IoError if the
// file cannot be read, ParseError naming the line for malformed records, and
// ValidationError naming the id for duplicates or empty texts.
Corpus load_corpus(const std::filesystem::path& path);

// Inverse of load_corpus: one JSON object per line in report order.
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

std::string report_to_json_line(const Report& report);

// Throws ValidationError if any report has an empty patient id.
SplitReport validate_split(const Corpus& corpus);

} // namespace impeval
