#pragma once

#include <stdexcept>
#include <string>

namespace igr {

enum class ErrorKind {
  MissingFile,
  MalformedCameras,
  ResolutionMismatch,
  NonDivisibleResolution,
  DegenerateMesh,
  EmptyPath,
  ShapeMismatch,
  CountMismatch,
  NonFiniteGradient,
  ModelMismatch,
  InvalidArgument,
  PortInUse,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace igr
