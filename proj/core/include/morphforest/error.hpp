#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace morphforest {

enum class ErrorKind {
  kIo,
  kParse,
  kFormat,
  kContract,
  kEmptyVocabulary,
  kNumerical,
  kValidation,
  kUsage,
};

// Base for every error raised by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Malformed input line. `line` is 1-based; 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& message)
      : Error(ErrorKind::kParse, source + ":" + std::to_string(line) + ": " +
                                     message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[noreturn]] inline void throw_contract(const std::string& message) {
  throw Error(ErrorKind::kContract, message);
}

}  // namespace morphforest
