#include "waitlist/error.hpp"

namespace waitlist {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ParamsViolateTheorem: return "ParamsViolateTheorem";
    case ErrorCode::InvalidT: return "InvalidT";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::MismatchedInputs: return "MismatchedInputs";
    case ErrorCode::NonPrefixOffers: return "NonPrefixOffers";
    case ErrorCode::AmbiguousSeats: return "AmbiguousSeats";
    case ErrorCode::DegenerateStratum: return "DegenerateStratum";
    case ErrorCode::ZeroFirstStage: return "ZeroFirstStage";
    case ErrorCode::MissingTypes: return "MissingTypes";
    case ErrorCode::Ingestion: return "IngestionError";
    case ErrorCode::Config: return "ConfigError";
  }
  return "UnknownError";
}

}  // namespace waitlist
