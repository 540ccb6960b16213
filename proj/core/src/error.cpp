#include "tnmf/error.hpp"

#include <utility>

namespace tnmf {

ParseError::ParseError(std::string path, std::size_t line, const std::string& what)
    : Error(path + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + what),
      path_(std::move(path)),
      line_(line) {}

NumericalError::NumericalError(std::size_t iteration, const std::string& what)
    : Error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration) {}

}  // namespace tnmf
