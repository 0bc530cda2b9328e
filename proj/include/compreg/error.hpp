#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace compreg {

enum class ErrorCode {
    AllZeroRow,
    NegativeEntry,
    NotOnSimplex,
    ZeroPart,
    NonFinite,
    InvalidDimension,
    DimensionMismatch,
    InvalidDesign,
    InvalidLambda,
    InvalidK,
    InvalidFraction,
    InvalidConfig,
    InsufficientReplications,
    NotThreeParts,
    SingularDesign,
    NonConvergence,
    ParseError,
    IoError,
};

std::string_view to_string(ErrorCode code);

// Process exit status for a failure of this kind: 2 validation, 3 numeric, 4 I/O.
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace compreg
