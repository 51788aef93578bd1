#pragma once

#include <charconv>
#include <string>

namespace qan {

/// Locale-independent shortest round-trip formatting (integers print bare).
inline std::string format_number(double value) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    (void)ec;
    return std::string(buf, ptr);
}

/// Writes content to path via a temp file + rename so readers never observe
/// a partial file.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace qan
