#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hupa {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller-supplied value violates an operation's precondition.
class InvalidArgument : public Error {
  public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// Malformed input file. `location` is a line number for text formats and a
/// byte offset for binary rasters; `location_kind` says which.
class ParseError : public Error {
  public:
    enum class Where { line, byte };

    ParseError(const std::string& msg, Where where, std::size_t location)
        : Error(msg + (where == Where::line ? " (line " : " (byte offset ") +
                std::to_string(location) + ")"),
          where_(where), location_(location) {}

    Where where() const noexcept { return where_; }
    std::size_t location() const noexcept { return location_; }

  private:
    Where where_;
    std::size_t location_;
};

class IoError : public Error {
  public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Input is valid but too degenerate to analyse (empty pattern, constant field, ...).
class DegenerateInput : public Error {
  public:
    explicit DegenerateInput(const std::string& msg) : Error(msg) {}
};

}  // namespace hupa
