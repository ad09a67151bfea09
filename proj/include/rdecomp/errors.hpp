#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rdecomp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An iterative kernel hit its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A sketched system came out numerically rank deficient. Retrying with a
/// different seed or a wider sketch usually succeeds.
class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& what, std::size_t required, std::size_t found)
      : Error(what), required_rank(required), numerical_rank(found) {}
  std::size_t required_rank;
  std::size_t numerical_rank;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& what, std::string file) : Error(what + ": " + file), path(std::move(file)) {}
  std::string path;
};

std::string shape_string(std::size_t rows, std::size_t cols);

}  // namespace rdecomp
