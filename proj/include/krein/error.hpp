#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace krein {

enum class ErrorKind {
    NotHermitian,
    NotUnitary,
    NumericalFailure,
    SingularFunctionValue,
    SingularMatrix,
    RankDeficientInput,
    UnitEigenvalue,
    NotAnExtension,
    SpectralParameter,
    NotInvariant,
    NotRelativelyPrime,
    RealParameter,
    SingularDenominator,
    ExhaustedCandidates,
    BranchCut,
    GridTooCoarse,
    BadDimensions,
    InvalidInput,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::SingularFunctionValue: return "SingularFunctionValue";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::RankDeficientInput: return "RankDeficientInput";
    case ErrorKind::UnitEigenvalue: return "UnitEigenvalue";
    case ErrorKind::NotAnExtension: return "NotAnExtension";
    case ErrorKind::SpectralParameter: return "SpectralParameter";
    case ErrorKind::NotInvariant: return "NotInvariant";
    case ErrorKind::NotRelativelyPrime: return "NotRelativelyPrime";
    case ErrorKind::RealParameter: return "RealParameter";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::ExhaustedCandidates: return "ExhaustedCandidates";
    case ErrorKind::BranchCut: return "BranchCut";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::BadDimensions: return "BadDimensions";
    case ErrorKind::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

/// Exception carrying a machine-readable error tag.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace krein
