#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mmco {

enum class ErrorKind {
    Parse,      // malformed document or missing field
    Invariant,  // well-formed but violates a value constraint
    Reference,  // unresolved or duplicate name
    Degenerate, // not enough information for a fit
    Io,
    Limit,      // request exceeds a hard guard (e.g. brute-force size)
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Invariant: return "invariant";
    case ErrorKind::Reference: return "reference";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Io: return "io";
    case ErrorKind::Limit: return "limit";
    }
    return "unknown";
}

/// Error raised by every loader and guard in the library. `field` names the
/// offending key (possibly a dotted path such as `tasks[1].kernels[0].ipl`)
/// and is empty when the error is not attributable to a single field.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string field, const std::string& message)
        : std::runtime_error(message), kind_(kind), field_(std::move(field)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& field() const noexcept { return field_; }

private:
    ErrorKind kind_;
    std::string field_;
};

} // namespace mmco
