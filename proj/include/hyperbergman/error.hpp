#pragma once

#include <stdexcept>
#include <string>

namespace hyperbergman {

// Broad failure classes; each maps onto one CLI exit code.
enum class ErrorKind {
    Usage,      // bad arguments or configuration (exit 2)
    Data,       // missing, malformed or inconsistent input data (exit 3)
    Numerical,  // a numerical procedure could not meet its tolerance (exit 4)
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Short machine-readable tag such as "budget-exhausted".
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

inline int exit_code(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::Data: return 3;
    case ErrorKind::Numerical: return 4;
    }
    return 1;
}

}  // namespace hyperbergman
