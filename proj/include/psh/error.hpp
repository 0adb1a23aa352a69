#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace psh {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on caller-supplied data does not hold.
class MalformedInput : public Error {
 public:
  using Error::Error;
};

// A value that should satisfy a structural invariant does not.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// An exhaustive computation would exceed its configured size bound.
class BoundRefusal : public Error {
 public:
  BoundRefusal(const std::string& what, std::uint64_t required, std::uint64_t limit)
      : Error(what + " (required " + std::to_string(required) + ", limit " +
              std::to_string(limit) + ")"),
        required_(required),
        limit_(limit) {}

  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  std::uint64_t required_;
  std::uint64_t limit_;
};

struct SourceSpan {
  int line = 1;
  int column = 1;
  int length = 0;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class ParseError : public Error {
 public:
  ParseError(std::string file, SourceSpan span, const std::string& message)
      : Error(format(file, span, message)),
        file_(std::move(file)),
        span_(span),
        message_(message) {}

  const std::string& file() const noexcept { return file_; }
  const SourceSpan& span() const noexcept { return span_; }
  const std::string& message() const noexcept { return message_; }

 private:
  static std::string format(const std::string& file, SourceSpan span,
                            const std::string& message) {
    return (file.empty() ? std::string("<input>") : file) + ":" +
           std::to_string(span.line) + ":" + std::to_string(span.column) +
           ": " + message;
  }

  std::string file_;
  SourceSpan span_;
  std::string message_;
};

}  // namespace psh
