#pragma once

#include <stdexcept>
#include <string>

namespace sip {

enum class ErrorCode {
    NonPositiveA,
    WeightNotVanishing,
    DegreeViolation,
    ParameterRange,
    UnknownPreset,
    IntervalDegenerate,
    NoConvergence,
    NormDiverges,
    BadQuantumNumbers,
    MapNotMonotone,
    OutOfInterval,
    TruncationTooSmall,
    NonOscillatory,
    DivergentRecursion,
    ZeroDenominator,
    ZeroEnergyDivision,
    ParityUnavailable,
    DivergentSeries,
    BasisMismatch,
    Parse,
};

const char* to_string(ErrorCode c);

// Validation-type failures map to CLI exit code 2, numeric ones to 3.
bool is_validation_error(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode c, const std::string& what)
        : std::runtime_error(std::string(to_string(c)) + ": " + what), code_(c) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace sip
