#pragma once

#include <stdexcept>
#include <string>

namespace bbmnet {

// Failure categories raised by graph validation, wave construction and the
// simulator. Condition *violations* (a graph that admits no wave) are not
// errors; they are reported as Diagnostic values by the constructor module.
enum class ErrorCode {
    BadVertexIndex,
    LoopEdge,
    BadLength,
    BadCoefficient,
    NotSimple,
    NotConnected,
    NotIncident,
    SingularAtZero,
    InvalidParams,
    Diverged,
    InconsistentSpeeds,
    GluingMismatch,
    GridTooCoarse,
    SolverSingular,
    Unstable,
    ParseError,
    IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace bbmnet
