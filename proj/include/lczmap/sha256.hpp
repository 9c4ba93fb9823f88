#pragma once

#include <cstdint>
#include <string>

namespace lcz {

/// Hex digest of a byte buffer.
std::string sha256_hex(const void* data, std::size_t len);

/// Hex digest of a file's contents; throws on IO failure.
std::string sha256_file(const std::string& path);

} // namespace lcz
