#pragma once

#include <string>
#include <vector>

namespace khe {

/// Shortest round-trip decimal form of a double; deterministic across runs.
std::string fmt_double(double v);

std::string join(const std::vector<std::string>& parts, const std::string& sep);

}  // namespace khe
