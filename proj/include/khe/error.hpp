#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace khe {

enum class ErrorKind {
  NonPhysicalState,
  Domain,
  Config,
  Shape,
  HierarchyMismatch,
  TooFewSamples,
  NonUniform,
  OutOfRange,
  UnsupportedWeight,
  MaxStepsExceeded,
  InterfaceCross,
  PartialCampaign,
  MissingLevel,
  EmptyWindow,
  ConvergenceFailure,
  Index,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` distinguishes the failure
/// classes callers branch on (CLI exit codes, campaign status records).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace khe
