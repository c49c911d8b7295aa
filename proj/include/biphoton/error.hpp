#pragma once

#include <stdexcept>
#include <string>

namespace biphoton {

enum class ErrorKind {
    InvalidArgument,
    NonCommensurateDelay,
    SupportClipped,
    GridTooSmall,
    ZeroAmplitude,
    WrongTermCount,
    NegativeWeight,
    ConvergenceFailure,
    SyntaxError,
    SemanticError,
    PipelineError,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Physics-domain failures, as opposed to malformed input.
    bool is_physics() const noexcept {
        switch (kind_) {
            case ErrorKind::NonCommensurateDelay:
            case ErrorKind::SupportClipped:
            case ErrorKind::GridTooSmall:
            case ErrorKind::ZeroAmplitude:
            case ErrorKind::WrongTermCount:
            case ErrorKind::NegativeWeight:
            case ErrorKind::ConvergenceFailure:
                return true;
            default:
                return false;
        }
    }

private:
    ErrorKind kind_;
};

}  // namespace biphoton
