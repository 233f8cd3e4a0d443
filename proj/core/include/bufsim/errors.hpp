#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bufsim {

/// Bad user input: generator parameters, config values, trace contents.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text in a trace/config/report file. Carries the 1-based line.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& what, std::size_t line)
        : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// API misuse: duplicate/unknown scan ids, backwards advance, unpin at zero.
class InvalidStateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A policy returned a pinned, empty, or out-of-range slot. The simulation
/// aborts; this is a test oracle, not a recoverable condition.
class PolicyContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Eviction was requested but every slot is pinned.
class NoVictimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace bufsim
