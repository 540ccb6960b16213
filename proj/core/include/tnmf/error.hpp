#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tnmf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. line() is 1-based; 0 when the failure is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::string path, std::size_t line, const std::string& what);

  const std::string& path() const noexcept { return path_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

// A value violates a domain invariant (negative count, bad shape, out-of-range parameter).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// The solver produced NaN/Inf. iteration() is the 1-based update that failed.
class NumericalError : public Error {
 public:
  NumericalError(std::size_t iteration, const std::string& what);

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace tnmf
