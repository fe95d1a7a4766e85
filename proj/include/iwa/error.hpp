#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace iwa {

enum class ErrorKind {
  EmptyInput,
  Parse,
  InsufficientData,
  Shape,
  Singular,
  Collinearity,
  Domain,
  Arity,
  Consistency,
  NoModel,
  Degenerate,
  SizeCap,
  Schema,
  Io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput: return "empty-input";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Singular: return "singular";
    case ErrorKind::Collinearity: return "collinearity";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Arity: return "arity";
    case ErrorKind::Consistency: return "consistency";
    case ErrorKind::NoModel: return "no-model";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::SizeCap: return "size-cap";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Malformed CSV input. Line numbers are 1-based and count the header line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::Parse, what + " at line " + std::to_string(line)), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class SingularSystemError : public Error {
 public:
  explicit SingularSystemError(std::size_t pivot)
      : Error(ErrorKind::Singular, "singular system: negligible pivot in column " + std::to_string(pivot)),
        pivot_(pivot) {}
  std::size_t pivot_index() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class CollinearityError : public Error {
 public:
  explicit CollinearityError(std::string column)
      : Error(ErrorKind::Collinearity, "design is collinear at column '" + column + "'"),
        column_(std::move(column)) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

}  // namespace iwa
