#include "wfi/error.hpp"

namespace wfi {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFinitePotential: return "NonFinitePotential";
        case ErrorCode::MassDeficit: return "MassDeficit";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::NegativeInput: return "NegativeInput";
        case ErrorCode::AtMedian: return "AtMedian";
        case ErrorCode::InsufficientRange: return "InsufficientRange";
        case ErrorCode::NonMonotoneBeta: return "NonMonotoneBeta";
        case ErrorCode::Divergent: return "Divergent";
        case ErrorCode::ZeroDerivative: return "ZeroDerivative";
        case ErrorCode::InsufficientSamples: return "InsufficientSamples";
        case ErrorCode::ShapeViolation: return "ShapeViolation";
        case ErrorCode::UnsupportedKind: return "UnsupportedKind";
        case ErrorCode::DerivativeMissing: return "DerivativeMissing";
        case ErrorCode::TailIntegralDiverges: return "TailIntegralDiverges";
        case ErrorCode::Instability: return "Instability";
        case ErrorCode::TimeOutOfRange: return "TimeOutOfRange";
        case ErrorCode::DegenerateFamily: return "DegenerateFamily";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NotInvertible: return "NotInvertible";
        case ErrorCode::NoCertificate: return "NoCertificate";
        case ErrorCode::PremiseViolated: return "PremiseViolated";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace wfi
