#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace waitlist {

enum class ErrorCode {
  ParamsViolateTheorem,
  InvalidT,
  DomainError,
  CapExceeded,
  MismatchedInputs,
  NonPrefixOffers,
  AmbiguousSeats,
  DegenerateStratum,
  ZeroFirstStage,
  MissingTypes,
  Ingestion,
  Config,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (notably the CLI) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace waitlist
