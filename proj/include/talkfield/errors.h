#pragma once

#include <stdexcept>
#include <string>

namespace talkfield {

// Error taxonomy used across the library. Everything derives from
// std::runtime_error so callers can catch broadly or by kind.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

struct ArgumentError : std::runtime_error {
  explicit ArgumentError(const std::string& what) : std::runtime_error(what) {}
};

struct PoseError : std::runtime_error {
  explicit PoseError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct IndexError : std::runtime_error {
  explicit IndexError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace talkfield
