#pragma once

#include <stdexcept>
#include <string>

namespace pulseaf {

// Failure categories. The CLI maps each kind to a distinct exit code, so
// callers can tell an unreadable file from a record with too few beats.
enum class ErrorKind {
    Io,               // missing/corrupt files, unwritable paths
    Config,           // invalid parameters, contract violations at call sites
    InsufficientData, // too few beats/intervals/samples to analyze
    NoCarrier,        // probing carrier absent from the recording
    Incompatible,     // model/feature fingerprint or format mismatch
    Internal,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return "io";
        case ErrorKind::Config: return "config";
        case ErrorKind::InsufficientData: return "insufficient-data";
        case ErrorKind::NoCarrier: return "no-carrier";
        case ErrorKind::Incompatible: return "incompatible";
        case ErrorKind::Internal: return "internal";
    }
    return "unknown";
}

} // namespace pulseaf
