#pragma once

#include <string>
#include <vector>

namespace placeloc {

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);

/// Splits one CSV line, honoring double-quoted fields. Throws DataError on
/// an unterminated quote.
std::vector<std::string> parse_csv_line(const std::string& line);

}  // namespace placeloc
