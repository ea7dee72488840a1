#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace morphforest::io {

// Reads a whole file; `.gz` files are decompressed transparently.
std::string read_file(const std::filesystem::path& path);

// Writes `content` to `path`, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view content);

std::vector<std::string_view> split(std::string_view text, char sep);

// Splits into lines, dropping a trailing '\r' from each line.
std::vector<std::string_view> lines(std::string_view text);

std::string_view trim(std::string_view text);

struct KeyValue {
  std::size_t line = 0;
  std::string key;
  std::string value;
};

// `key = value` lines; `#` starts a comment. Throws a ParseError on lines
// without '='.
std::vector<KeyValue> parse_key_values(std::string_view text,
                                       std::string_view source);

// Round-trippable decimal rendering of a double.
std::string format_double(double value);

std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace morphforest::io
