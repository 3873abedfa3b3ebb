// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace rsr::csv {

/// Splits one line on commas, honouring double-quoted fields ("" escapes a quote).
std::vector<std::string> split_line(std::string_view line);

/// Quotes a field only when it contains a comma, quote or newline.
std::string escape(std::string_view field);

std::string join(const std::vector<std::string>& fields);

/// Shortest decimal text that parses back to the same double.
std::string format_real(double value);

/// Fixed-point text with `digits` decimals, for human-facing tables.
std::string format_fixed(double value, int digits);

/// Parses a real cell; throws InputError tagged with `location` on bad text.
double parse_real(std::string_view text, const std::string& location);

struct Document {
    std::vector<std::string> comments;  ///< '#' lines, without the leading "# "
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  ///< source line of each row
};

/// Reads a comma-separated table with a header row. Lines starting with '#'
/// are collected as comments; blank lines are skipped. Every row must have
/// exactly as many fields as the header.
Document read(std::istream& in, const std::string& source_name);

} // namespace rsr::csv
