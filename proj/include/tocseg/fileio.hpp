#pragma once

#include <string>
#include <string_view>

namespace tocseg {

// Whole-file read; throws Error when the file cannot be opened.
std::string read_file(const std::string& path);

// Writes to "<path>.tmp.<pid>" and renames over `path`, so readers never
// see a partial file.
void write_file_atomic(const std::string& path, std::string_view content);

}  // namespace tocseg
