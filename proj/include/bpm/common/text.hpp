#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bpm {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_view(std::string_view s, char delim);
std::vector<std::string> split_list(std::string_view s, char delim = ',');

// Strict numeric parsing: the whole (trimmed) token must be consumed.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

// Fixed-precision rendering used by reports ("undefined" handling is the
// caller's job).
std::string format_fixed(double v, int decimals);

// RFC 4180 quoting when the field contains a delimiter, quote or newline.
std::string csv_escape(std::string_view field);
// Splits one CSV record (no embedded newlines) honouring quoted fields.
// Throws DataError on an unterminated quote.
std::vector<std::string> parse_csv_record(std::string_view line);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace bpm
