#pragma once

#include <filesystem>
#include <string>

namespace snls::io {

/// Write-to-temp-then-rename; artifacts are never partially overwritten.
void atomic_write(const std::filesystem::path& path,
                  const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Git-style content hash: SHA-1 of "blob <size>\0<bytes>", hex-encoded.
std::string git_blob_hash(const std::string& bytes);

/// Shortest round-trip decimal formatting for CSV determinism.
std::string format_double(double value);

}  // namespace snls::io
