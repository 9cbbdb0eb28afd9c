#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace intentflow::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);
std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
// Replaces CR/LF (and tabs) with single spaces so the result fits on one line.
std::string single_line(std::string_view s);
// Position of `needle` in `hay` ignoring ASCII case, or npos.
std::size_t ifind(std::string_view hay, std::string_view needle, std::size_t from = 0);

/// Strips a leading list marker ("- ", "* ", "• ", "1. ", "2) ") from a line.
/// Returns false if the line carries no marker.
bool strip_bullet(std::string_view line, std::string& out);

}  // namespace intentflow::text
