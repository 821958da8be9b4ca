#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace distham {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes do not agree with the declared dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A numerical operation could not be carried out: non-SPD metric, rank drop
/// of the constraint matrix, singular distributional two-form, non-finite
/// evaluator output.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, double condition = 0.0)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// An argument is outside its allowed range (non-positive step, too many
/// steps, unknown method or chart name).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A hypothesis of an HJ residual or reduction operation is violated
/// (point off the constraint submanifold, non-invariant section, ...).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Configuration or expression problem. Carries an optional byte offset into
/// the offending text and an optional line number of the config file.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what,
                       std::optional<std::size_t> offset = std::nullopt,
                       std::optional<std::size_t> line = std::nullopt)
      : Error(what), offset_(offset), line_(line) {}

  std::optional<std::size_t> offset() const { return offset_; }
  std::optional<std::size_t> line() const { return line_; }

 private:
  std::optional<std::size_t> offset_;
  std::optional<std::size_t> line_;
};

}  // namespace distham
