#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace msnm::csv {

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes; surrounding whitespace is not trimmed.
std::vector<std::string> split_record(std::string_view line);

/// Quotes a field only when it needs it.
std::string escape_field(std::string_view field);

/// Parses a full-string decimal number; throws ValidationError otherwise.
double parse_double(std::string_view text, std::string_view context);

/// Shortest representation that round-trips to the same double.
std::string format_double(double value);

/// Strips a trailing '\r' left by CRLF files.
void chomp(std::string& line);

}  // namespace msnm::csv
