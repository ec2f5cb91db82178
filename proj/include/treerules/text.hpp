#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace treerules {

// Shortest decimal text that reads back to exactly the same double.
std::string format_number(double value);

// Whole-string parse; nullopt on trailing garbage or an empty string.
std::optional<double> parse_number(std::string_view text);

std::vector<std::string_view> split(std::string_view line, char sep);

std::string_view trim(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace treerules
