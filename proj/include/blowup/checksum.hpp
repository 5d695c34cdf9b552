#pragma once

#include <string>

namespace blowup {

/// Lower-case hex SHA-256.
std::string sha256_hex(const std::string& bytes);
/// Throws IoError if the file cannot be read.
std::string sha256_file(const std::string& path);

}  // namespace blowup
