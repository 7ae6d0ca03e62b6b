#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace canform {

enum class ErrorKind {
    ParseError,
    ZeroDenominator,
    PoleAtEvaluationPoint,
    DimensionMismatch,
    SingularTransform,
    WrongStateDimension,
    NonzeroPassthrough,
    InvalidLaplacian,
    DisconnectedGraph,
    InvalidSpec,
    GradientsNotBalanced,
    T1Violated,
    T2Violated,
    UnknownAlgorithm,
    ZeroStepsize,
    MissingParameter,
    PassthroughInClosedLoop,
    NonpositiveCurvature,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::PoleAtEvaluationPoint: return "PoleAtEvaluationPoint";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularTransform: return "SingularTransform";
    case ErrorKind::WrongStateDimension: return "WrongStateDimension";
    case ErrorKind::NonzeroPassthrough: return "NonzeroPassthrough";
    case ErrorKind::InvalidLaplacian: return "InvalidLaplacian";
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::GradientsNotBalanced: return "GradientsNotBalanced";
    case ErrorKind::T1Violated: return "T1Violated";
    case ErrorKind::T2Violated: return "T2Violated";
    case ErrorKind::UnknownAlgorithm: return "UnknownAlgorithm";
    case ErrorKind::ZeroStepsize: return "ZeroStepsize";
    case ErrorKind::MissingParameter: return "MissingParameter";
    case ErrorKind::PassthroughInClosedLoop: return "PassthroughInClosedLoop";
    case ErrorKind::NonpositiveCurvature: return "NonpositiveCurvature";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind so the
/// CLI can map it onto a stable exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace canform
