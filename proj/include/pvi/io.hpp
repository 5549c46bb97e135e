#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace pvi {

// Writes via a temporary sibling plus rename, so readers never observe a
// partially written file.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

std::string read_text_file(const std::filesystem::path& path);

// Minimal RFC-4180-style CSV: fields containing commas, quotes or newlines
// are quoted, quotes are doubled.
std::string csv_field(const std::string& raw);
std::string csv_row(const std::vector<std::string>& fields);
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

std::string format_double(double value);

}  // namespace pvi
