#include "evoml/error.hpp"

namespace evoml {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonNumericFeature: return "NonNumericFeature";
    case ErrorCode::NotBinary: return "NotBinary";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::TooFewInstances: return "TooFewInstances";
    case ErrorCode::DegenerateTraining: return "DegenerateTraining";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EvaluationFailed: return "EvaluationFailed";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::AlgorithmMismatch: return "AlgorithmMismatch";
    case ErrorCode::SpaceExhausted: return "SpaceExhausted";
    case ErrorCode::InsufficientParents: return "InsufficientParents";
    case ErrorCode::EmptyEnsemble: return "EmptyEnsemble";
    case ErrorCode::UnknownModelId: return "UnknownModelId";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NoModels: return "NoModels";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::Conflict: return "Conflict";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace evoml
