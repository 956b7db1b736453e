#pragma once

#include <stdexcept>
#include <string>

namespace bcp {

enum class ErrorCode {
    ParseError,
    UnknownName,
    DuplicateName,
    PopulationTooSmall,
    EmptyConfiguration,
    NotEnabled,
    ArityMismatch,
    AlphabetMismatch,
    LeaderMismatch,
    MissingBoundDeclaration,
    NotNBounded,
    CounterCountTooLarge,
    BudgetExceeded,
    IoError,
};

const char* error_code_name(ErrorCode code);

/// All library failures surface as this exception; `code` lets callers and the
/// CLI map failures to exit codes without string matching.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace bcp
