#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal UTF-8 helpers. Character classes and case mapping come from the
// C.UTF-8 locale when the platform provides it, otherwise ASCII rules apply.
namespace ontomatch::unicode {

std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view codepoints);
void append_utf8(std::string& out, char32_t cp);

bool is_alnum(char32_t cp);
bool is_space(char32_t cp);
char32_t to_lower(char32_t cp);

std::string to_lower(std::string_view utf8);
std::string trim(std::string_view utf8);
// Lowercases, trims and collapses every whitespace run to one ASCII space.
std::string normalize_spaces(std::string_view utf8);

}  // namespace ontomatch::unicode
