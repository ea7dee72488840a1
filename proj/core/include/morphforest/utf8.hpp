#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace morphforest::utf8 {

// Code point sequence of a UTF-8 string. Invalid bytes decode to U+FFFD.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

// Length in code points.
std::size_t length(std::string_view text);

// NFC normalization, optionally followed by root-locale lowercasing.
std::string normalize(std::string_view text, bool lowercase);

// True when every code point is a letter or a combining mark.
bool is_alphabetic(std::string_view text);

// True when the text contains any whitespace code point.
bool has_whitespace(std::string_view text);

}  // namespace morphforest::utf8
