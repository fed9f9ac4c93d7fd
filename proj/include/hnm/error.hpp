#pragma once

#include <stdexcept>
#include <string>

namespace hnm {

enum class ErrorCode {
    InvalidArgument,
    Config,
    Escape,
    NotTangency,
    OrientableGlobalMap,
    IllConditioned,
    TargetUnreachable,
    NoRealOrbit,
    Resonant,
    CrossFormSolveFailed,
    StripOutsideWindow,
    NewtonDiverged,
    SingularJacobian,
    CollapsedToFixedPoint,
    BracketFailed,
    NotElliptic,
    PrecisionFloor,
    NotInResonanceWindow,
};

/// Stable machine-readable name, used in error JSON and the C API.
const char* error_code_name(ErrorCode code);

/// True for errors caused by bad input rather than by a numerical failure.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// An orbit left the O(1) neighbourhood; `stage` is the index of the map stage that overflowed.
class EscapeError : public Error {
public:
    EscapeError(int stage, const std::string& what) : Error(ErrorCode::Escape, what), stage_(stage) {}
    int stage() const noexcept { return stage_; }

private:
    int stage_;
};

}  // namespace hnm
