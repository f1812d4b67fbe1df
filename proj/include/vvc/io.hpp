#pragma once

#include <string>

namespace vvc {

/// Write a whole file atomically: temp file in the same directory, then
/// rename over the target.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

} // namespace vvc
