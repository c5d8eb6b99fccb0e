#pragma once

#include <string>
#include <string_view>
#include <vector>

// Small ASCII string helpers shared by the parsers.
namespace echoscope::text {

std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::string_view trim(std::string_view s);
bool starts_with_icase(std::string_view s, std::string_view prefix);
std::vector<std::string> split(std::string_view s, char sep);

/// Splits one line of a delimited table. Fields may be double-quoted with
/// "" escapes. Returns false on an unterminated or misplaced quote.
bool split_delimited(std::string_view line, char delim, std::vector<std::string>& out);

/// Quotes a field for CSV output when it contains a delimiter, quote or newline.
std::string csv_escape(std::string_view field);

/// Fixed-point formatting with `digits` decimals, or "NA" for NaN.
std::string fixed(double value, int digits = 6);

}  // namespace echoscope::text
