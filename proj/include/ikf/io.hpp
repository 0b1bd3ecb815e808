#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ikf::io {

/// Shortest decimal that parses back to the identical double.
std::string format_double(double value);

/// Strict full-field parse; returns false on trailing garbage or empty input.
bool parse_double(std::string_view text, double& out);

/// One RFC-4180 record split into unquoted fields. `line` must not contain
/// the record terminator.
std::vector<std::string> split_csv_record(std::string_view line);

/// Quotes a field only when it contains a separator, quote or newline.
std::string quote_csv_field(std::string_view field);

/// Writes `contents` to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace ikf::io
