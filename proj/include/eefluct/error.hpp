#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eefluct {

enum class ErrorKind {
  UnsupportedFamily,
  QuadratureDivergence,
  ConvergenceFailure,
  ProjectionCorrupt,
  InvalidAlpha,
  DegenerateSample,
  TooFewSamples,
  ValidationError,
  RealizationFailure,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers what failed.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the "Kind: " prefix of what().
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace eefluct
