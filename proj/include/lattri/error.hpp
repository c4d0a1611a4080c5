#pragma once

#include <stdexcept>
#include <string>

namespace lattri {

/// Error categories surfaced by the core library. The C API maps each one
/// onto an `lt_status` code with the same name.
enum class ErrorCode {
    InvalidArgument,
    InvalidPolygon,
    ConstraintConflict,
    InvalidEdge,
    UnitAxisEdge,
    InvalidTriangulation,
    NotFlippable,
    AtGroundState,
    MidpointMismatch,
    NotARoot,
    NotGroundEdge,
    UndefinedClass,
    InvalidLambda,
    CapExceeded,
    DegenerateCondition,
    MidpointSetMismatch,
    ParseError,
    UnknownExperiment,
    IoError,
    Internal,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

/// Always-on internal consistency check. A failure means a structural
/// property the library relies on does not hold for the current input.
#define LATTRI_ENSURE(cond, msg)                                             \
    do {                                                                     \
        if (!(cond)) {                                                       \
            ::lattri::fail(::lattri::ErrorCode::Internal,                    \
                           std::string("internal check failed: ") + (msg));  \
        }                                                                    \
    } while (0)

} // namespace lattri
