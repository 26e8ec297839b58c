#pragma once

#include <filesystem>
#include <string>

namespace hupa::cli {

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace hupa::cli
