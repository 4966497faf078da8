#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small helpers shared by the line-oriented file formats.

namespace aamcm::text {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::string_view trim(std::string_view s);
/// Removes a trailing `#` comment and surrounding whitespace.
std::string_view strip_comment(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace aamcm::text
