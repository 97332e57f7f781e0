#pragma once

#include <stdexcept>
#include <string>

namespace gerw {

/// Failure classes surfaced to callers (and mapped to CLI exit codes).
enum class ErrorKind {
    domain,                  // parameter outside the admissible region
    config,                  // malformed or inconsistent configuration
    infinite_support,        // kernel is outside the finite-support model class
    overflow_risk,           // horizon * K does not fit the packed coordinate width
    too_large,               // exhaustive enumeration over the cap
    config_mismatch,         // merging aggregates built from different configs
    hypothesis_unverifiable, // excitation set has no counting method
    not_rational,            // exact arithmetic requested on a float-only kernel
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
    if (!cond) fail(kind, what);
}

} // namespace gerw
