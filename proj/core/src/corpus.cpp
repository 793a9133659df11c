#include "impeval/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "impeval/errors.hpp"

namespace impeval {

using nlohmann::json;

std::string_view to_string(Split split) {
    switch (split) {
    case Split::kTrain:
        return "train";
    case Split::kValidation:
        return "validation";
    case Split::kTest:
        return "test";
    }
    return "train";
}

std::optional<Split> split_from_string(std::string_view label) {
    if (label == "train") return Split::kTrain;
    if (label == "validation") return Split::kValidation;
    if (label == "test") return Split::kTest;
    return std::nullopt;
}

namespace {

bool whitespace_only(std::string_view text) {
    return text.find_first_not_of(" \t\r\n\f\v") == std::string_view::npos;
}

std::string require_string(const json& record, const char* key,
                           const std::string& where) {
    auto it = record.find(key);
    if (it == record.end()) {
        throw ParseError(where + ": missing field '" + key + "'");
    }
    if (!it->is_string()) {
        throw ParseError(where + ": field '" + key + "' must be a string");
    }
    return it->get<std::string>();
}

} // namespace

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open corpus file: " + path.string());
    }

    Corpus corpus;
    corpus.source_path = path.string();
    std::unordered_set<std::string> seen_ids;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (whitespace_only(line)) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);

        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (!record.is_object()) {
            throw ParseError(where + ": record is not a JSON object");
        }

        Report report;
        report.id = require_string(record, "id", where);
        report.patient_id = require_string(record, "patient_id", where);
        report.findings = require_string(record, "findings", where);
        report.impression = require_string(record, "impression", where);

        if (auto it = record.find("tracer"); it != record.end() && it->is_string() &&
                                             !it->get<std::string>().empty()) {
            report.tracer = it->get<std::string>();
        } else {
            report.tracer = "unknown";
        }

        const std::string split_label = require_string(record, "split", where);
        auto split = split_from_string(split_label);
        if (!split) {
            throw ParseError(where + ": unknown split label '" + split_label + "'");
        }
        report.split = *split;

        if (whitespace_only(report.findings)) {
            throw ValidationError(where + ": report '" + report.id +
                                  "' has empty findings");
        }
        if (whitespace_only(report.impression)) {
            throw ValidationError(where + ": report '" + report.id +
                                  "' has empty impression");
        }
        if (!seen_ids.insert(report.id).second) {
            throw ValidationError(where + ": duplicate report id '" + report.id + "'");
        }
        corpus.reports.push_back(std::move(report));
    }
    if (in.bad()) {
        throw IoError("read failure on corpus file: " + path.string());
    }
    return corpus;
}

std::string report_to_json_line(const Report& report) {
    json record;
    record["id"] = report.id;
    record["patient_id"] = report.patient_id;
    record["tracer"] = report.tracer;
    record["findings"] = report.findings;
    record["impression"] = report.impression;
    record["split"] = std::string(to_string(report.split));
    return record.dump();
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open corpus file for writing: " + path.string());
    }
    for (const Report& report : corpus.reports) {
        out << report_to_json_line(report) << '\n';
    }
    if (!out) {
        throw IoError("write failure on corpus file: " + path.string());
    }
}

SplitReport validate_split(const Corpus& corpus) {
    SplitReport result;
    std::map<std::string, std::set<Split>> patient_splits;
    for (const Report& report : corpus.reports) {
        if (report.patient_id.empty()) {
            throw ValidationError("report '" + report.id + "' has empty patient_id");
        }
        switch (report.split) {
        case Split::kTrain:
            ++result.train;
            break;
        case Split::kValidation:
            ++result.validation;
            break;
        case Split::kTest:
            ++result.test;
            break;
        }
        patient_splits[report.patient_id].insert(report.split);
    }
    for (const auto& [patient, splits] : patient_splits) {
        if (splits.size() > 1) {
            result.violations.push_back(patient);
        }
    }
    // std::map iteration already yields lexicographic order.
    return result;
}

} // namespace impeval
