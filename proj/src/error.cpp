#include "khe/error.hpp"

namespace khe {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPhysicalState: return "NonPhysicalState";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Shape: return "ShapeError";
    case ErrorKind::HierarchyMismatch: return "HierarchyMismatch";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::NonUniform: return "NonUniform";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::UnsupportedWeight: return "UnsupportedWeight";
    case ErrorKind::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorKind::InterfaceCross: return "InterfaceCross";
    case ErrorKind::PartialCampaign: return "PartialCampaign";
    case ErrorKind::MissingLevel: return "MissingLevel";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::Index: return "IndexError";
    case ErrorKind::Io: return "IoError";
  }
  return "Error";
}

}  // namespace khe
