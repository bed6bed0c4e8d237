#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace blockclust::csv {

// Minimal RFC-4180 style CSV: fields with commas, quotes or newlines are
// double-quoted on write; parse_line accepts quoted and bare fields.
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);
std::vector<std::string> parse_line(std::string_view line);

} // namespace blockclust::csv
