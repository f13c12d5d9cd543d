#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace chats {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Splits on '\n', keeping empty lines; a trailing newline does not produce
// an extra empty element.
std::vector<std::string_view> split_lines(std::string_view s);

bool is_ascii_alpha(char ch);
bool is_ascii_digit(char ch);
bool is_ascii_upper(char ch);
bool is_ascii_space(char ch);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

}  // namespace chats
