#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace hotelwatt::io {

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so
/// readers only ever observe a complete file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace hotelwatt::io
