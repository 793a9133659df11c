#pragma once

#include <stdexcept>
#include <string>

namespace impeval {

// Failure reading or writing a file. Maps to CLI exit code 1.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input data (bad JSONL line, bad lexicon line). Messages name the
// offending file and line.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally well-formed input that violates a domain invariant
// (duplicate report id, empty lexicon, empty patient id).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration: unknown rubric kind, bad prompt template, missing input
// path. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Caller broke a function contract (dimension mismatch, id mismatch,
// undefined correlation).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace impeval
