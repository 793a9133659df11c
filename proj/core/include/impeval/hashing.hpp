#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace impeval {

// Hex-encoded SHA-256.
std::string sha256_hex(std::string_view data);

// Hashes file contents; throws IoError if the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

} // namespace impeval
