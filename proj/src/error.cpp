#include "compreg/error.hpp"

namespace compreg {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::AllZeroRow: return "AllZeroRow";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::NotOnSimplex: return "NotOnSimplex";
    case ErrorCode::ZeroPart: return "ZeroPart";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidDesign: return "InvalidDesign";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::InvalidFraction: return "InvalidFraction";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InsufficientReplications: return "InsufficientReplications";
    case ErrorCode::NotThreeParts: return "NotThreeParts";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

int exit_status(ErrorCode code)
{
    switch (code) {
    case ErrorCode::SingularDesign:
    case ErrorCode::NonFinite:
    case ErrorCode::NonConvergence:
        return 3;
    case ErrorCode::ParseError:
    case ErrorCode::IoError:
        return 4;
    default:
        return 2;
    }
}

} // namespace compreg
