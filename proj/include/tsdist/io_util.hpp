#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace tsdist::io {

// Read a whole file; throws Error(errc::io) on failure.
std::string read_file(const std::filesystem::path& path);

// Write via a temp file in the same directory plus rename, so readers never
// observe a half-written file.
void atomic_write(const std::filesystem::path& path, std::string_view content);

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);

}  // namespace tsdist::io
