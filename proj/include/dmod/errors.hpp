#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace dmod {

/// Failure category, used by callers (and the command line tool) to decide how
/// to react: bad input, a configured resource cap being hit, or a broken
/// internal invariant.
enum class ErrorKind { InvalidInput, CapExceeded, Internal };

/// Single exception type for the whole library.  `code()` is a stable
/// machine-readable identifier ("NonPrime", "FieldMismatch", ...); the what()
/// string prepends it to a human-readable message.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& code() const noexcept { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

[[noreturn]] inline void fail_input(const std::string& code, const std::string& msg) {
    throw Error(ErrorKind::InvalidInput, code, msg);
}

[[noreturn]] inline void fail_cap(const std::string& code, const std::string& msg) {
    throw Error(ErrorKind::CapExceeded, code, msg);
}

[[noreturn]] inline void fail_internal(const std::string& msg) {
    throw Error(ErrorKind::Internal, "InternalInvariantViolation", msg);
}

/// Throws an internal-invariant error when `cond` is false.  Used for
/// conditions that are mathematically guaranteed; reaching the throw means the
/// implementation, not the input, is wrong.
inline void check_internal(bool cond, const char* msg) {
    if (!cond) fail_internal(msg);
}

}  // namespace dmod
