#include "igr/error.hpp"

namespace igr {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::MalformedCameras: return "MalformedCameras";
    case ErrorKind::ResolutionMismatch: return "ResolutionMismatch";
    case ErrorKind::NonDivisibleResolution: return "NonDivisibleResolution";
    case ErrorKind::DegenerateMesh: return "DegenerateMesh";
    case ErrorKind::EmptyPath: return "EmptyPath";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::ModelMismatch: return "ModelMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::PortInUse: return "PortInUse";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace igr
