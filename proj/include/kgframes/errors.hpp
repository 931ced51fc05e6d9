#pragma once

#include <stdexcept>
#include <string>

namespace kgf {

struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct NotHermitian : std::invalid_argument {
  explicit NotHermitian(const std::string& what) : std::invalid_argument(what) {}
};

struct NotPositive : std::invalid_argument {
  explicit NotPositive(const std::string& what) : std::invalid_argument(what) {}
};

struct NoSolution : std::runtime_error {
  explicit NoSolution(const std::string& what) : std::runtime_error(what) {}
};

struct NotTight : std::invalid_argument {
  explicit NotTight(const std::string& what) : std::invalid_argument(what) {}
};

struct NotOrthogonal : std::invalid_argument {
  explicit NotOrthogonal(const std::string& what) : std::invalid_argument(what) {}
};

struct DualityFailed : std::invalid_argument {
  explicit DualityFailed(const std::string& what) : std::invalid_argument(what) {}
};

struct ShapeMismatch : std::invalid_argument {
  explicit ShapeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kgf
