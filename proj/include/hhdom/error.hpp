#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace hhdom {

enum class ErrorKind {
  parse,
  domain,
  overflow,
  range,
  nonpositive,
  degenerate,
  budget,
  eval,
  precondition,
  kernel_symmetry,
  invalid_argument,
  config,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::domain: return "domain";
    case ErrorKind::overflow: return "overflow";
    case ErrorKind::range: return "range";
    case ErrorKind::nonpositive: return "nonpositive";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::budget: return "budget";
    case ErrorKind::eval: return "eval";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::kernel_symmetry: return "kernel_symmetry";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::config: return "config";
  }
  return "unknown";
}

/// Base of every error thrown by the library. `kind()` is stable and is what
/// the CLI serializes; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by expression evaluation. Kind is either `domain` or `overflow`.
class EvalError : public Error {
 public:
  using Error::Error;
};

/// Malformed expression source. `offset` is a byte offset into the full
/// source (it may equal the source length when input ended too early);
/// `excerpt` is the source line containing it.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected, std::string_view source)
      : ParseError(offset, std::move(expected), source, line_start(source, offset)) {}

  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
  [[nodiscard]] const std::string& expected() const noexcept { return expected_; }
  [[nodiscard]] const std::string& excerpt() const noexcept { return excerpt_; }

 private:
  ParseError(std::size_t offset, std::string expected, std::string_view source,
             std::size_t start)
      : Error(ErrorKind::parse, format(offset - start, expected,
                                       line_at(source, start))),
        offset_(offset),
        expected_(std::move(expected)),
        excerpt_(line_at(source, start)) {}

  static std::size_t line_start(std::string_view source, std::size_t offset) {
    if (offset > source.size()) offset = source.size();
    const auto pos = source.substr(0, offset).rfind('\n');
    return pos == std::string_view::npos ? 0 : pos + 1;
  }

  static std::string line_at(std::string_view source, std::size_t start) {
    const auto end = source.find('\n', start);
    return std::string(source.substr(start, end == std::string_view::npos
                                                ? std::string_view::npos
                                                : end - start));
  }

  static std::string format(std::size_t column, const std::string& expected,
                            const std::string& excerpt) {
    std::string msg = "expected " + expected + " at column " +
                      std::to_string(column + 1) + "\n  " + excerpt + "\n  ";
    msg.append(column, ' ');
    msg += '^';
    return msg;
  }

  std::size_t offset_;
  std::string expected_;
  std::string excerpt_;
};

}  // namespace hhdom
