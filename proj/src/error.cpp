#include "sgeo/error.hpp"

namespace sgeo {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MismatchedGeneratorCount: return "MismatchedGeneratorCount";
    case ErrorCode::TooManyGenerators: return "TooManyGenerators";
    case ErrorCode::ZeroBody: return "ZeroBody";
    case ErrorCode::OddElement: return "OddElement";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::UnknownCoordinate: return "UnknownCoordinate";
    case ErrorCode::NonHomogeneousOperand: return "NonHomogeneousOperand";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::ParityViolation: return "ParityViolation";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::SingularBody: return "SingularBody";
    case ErrorCode::InvalidPoint: return "InvalidPoint";
    case ErrorCode::LeftDomain: return "LeftDomain";
    case ErrorCode::GridTooShort: return "GridTooShort";
    case ErrorCode::NonHomogeneousField: return "NonHomogeneousField";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ModelError: return "ModelError";
  }
  return "Unknown";
}

}  // namespace sgeo
