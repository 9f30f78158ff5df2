#pragma once
#include <stdexcept>
#include <string>

namespace wfi {

enum class ErrorCode {
    NonFinitePotential,
    MassDeficit,
    OutOfDomain,
    NegativeInput,
    AtMedian,
    InsufficientRange,
    NonMonotoneBeta,
    Divergent,
    ZeroDerivative,
    InsufficientSamples,
    ShapeViolation,
    UnsupportedKind,
    DerivativeMissing,
    TailIntegralDiverges,
    Instability,
    TimeOutOfRange,
    DegenerateFamily,
    InvalidArgument,
    NotInvertible,
    NoCertificate,
    PremiseViolated,
    ConfigError,
    IoError
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace wfi
