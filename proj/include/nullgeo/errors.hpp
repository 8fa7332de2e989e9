#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nullgeo {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text. `position` is the 1-based character column.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at offset " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnknownSymbolError : public Error {
 public:
  UnknownSymbolError(const std::string& symbol, std::size_t position)
      : Error("unknown symbol '" + symbol + "' at offset " + std::to_string(position)),
        symbol_(symbol),
        position_(position) {}
  const std::string& symbol() const noexcept { return symbol_; }
  std::size_t position() const noexcept { return position_; }

 private:
  std::string symbol_;
  std::size_t position_;
};

// Evaluation left the domain of an operation (sqrt of a non-positive value,
// division by zero, ...). `subexpression` is the rendered offending node.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, const std::string& subexpression)
      : Error(what + " in '" + subexpression + "'"), subexpression_(subexpression) {}
  const std::string& subexpression() const noexcept { return subexpression_; }

 private:
  std::string subexpression_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class SingularMetricError : public Error {
 public:
  explicit SingularMetricError(double condition)
      : Error("metric is singular or ill-conditioned (condition estimate " +
              std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

// Frame relations or transversal construction failed at a point.
class FrameError : public Error {
 public:
  using Error::Error;
};

// Singular values straddle the rank threshold too closely to decide a rank.
class RankAmbiguityError : public Error {
 public:
  using Error::Error;
};

// Scenario document does not match the schema. `path` is a JSON pointer.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& message)
      : Error(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace nullgeo
