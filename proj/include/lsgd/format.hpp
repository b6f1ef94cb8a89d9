#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lsgd {

/// Shortest text that parses back to exactly `value`.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);
std::optional<unsigned long> parse_unsigned(std::string_view text);

/// Splits on `sep` without collapsing empty fields.
std::vector<std::string_view> split(std::string_view text, char sep);

std::string_view trim(std::string_view text);

}  // namespace lsgd
