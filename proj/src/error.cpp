#include "eefluct/error.hpp"

namespace eefluct {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorKind::QuadratureDivergence: return "QuadratureDivergence";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::ProjectionCorrupt: return "ProjectionCorrupt";
    case ErrorKind::InvalidAlpha: return "InvalidAlpha";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::RealizationFailure: return "RealizationFailure";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

}  // namespace eefluct
