#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gah {

enum class ErrorKind {
    InvalidArgument,
    NonFiniteState,
    StepSizeUnderflow,
    EmptyTrajectory,
    MissingDenseOutput,
    NoReturn,
    NoConvergence,
    SingularJacobian,
    AmbiguousBranch,
    OutOfDomain,
    NoFixedPoint,
    NotTrapping,
    Timeout,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::NonFiniteState: return "NonFiniteState";
        case ErrorKind::StepSizeUnderflow: return "StepSizeUnderflow";
        case ErrorKind::EmptyTrajectory: return "EmptyTrajectory";
        case ErrorKind::MissingDenseOutput: return "MissingDenseOutput";
        case ErrorKind::NoReturn: return "NoReturn";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::SingularJacobian: return "SingularJacobian";
        case ErrorKind::AmbiguousBranch: return "AmbiguousBranch";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::NoFixedPoint: return "NoFixedPoint";
        case ErrorKind::NotTrapping: return "NotTrapping";
        case ErrorKind::Timeout: return "Timeout";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, const std::string& what, ErrorKind kind = ErrorKind::InvalidArgument) {
    if (!cond) throw Error(kind, what);
}

}  // namespace gah
