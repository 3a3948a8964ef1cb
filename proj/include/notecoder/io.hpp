#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace notecoder {

/// Whole file as bytes. Throws DataError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

/// Replaces the file, creating parent directories. Throws DataError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace notecoder
