/// Exception hierarchy shared by the library and the CLI.
///
/// Every error carries a coarse category so the CLI can map failures onto
/// stable exit codes (and a machine-readable JSON error object) without
/// string matching.
#pragma once

#include <stdexcept>
#include <string>

namespace dimerspec {

enum class ErrorCategory {
    invalid_input,   // bad geometry, bad arguments, bad config
    empty_gap,       // spectral gap requested but the band gap is empty
    solver_failure,  // iteration did not converge / tolerance not met
    theory_violation,// a structural identity the code relies on failed
    io,              // filesystem / parse problems
};

inline const char* to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::invalid_input:    return "invalid-input";
        case ErrorCategory::empty_gap:        return "empty-gap";
        case ErrorCategory::solver_failure:   return "solver-failure";
        case ErrorCategory::theory_violation: return "theory-violation";
        case ErrorCategory::io:               return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

// ---------------------------------------------------------------------------
// Convenience subclasses (one per category, plus a couple of specific ones)
// ---------------------------------------------------------------------------

struct InvalidInputError : Error {
    explicit InvalidInputError(const std::string& msg)
        : Error(ErrorCategory::invalid_input, msg) {}
};

struct EmptyGapError : Error {
    explicit EmptyGapError(const std::string& msg)
        : Error(ErrorCategory::empty_gap, msg) {}
};

struct SolverFailureError : Error {
    explicit SolverFailureError(const std::string& msg)
        : Error(ErrorCategory::solver_failure, msg) {}
};

struct TheoryViolationError : Error {
    explicit TheoryViolationError(const std::string& msg)
        : Error(ErrorCategory::theory_violation, msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg)
        : Error(ErrorCategory::io, msg) {}
};

/// Thrown when a value claimed to be an eigenvalue fails the defining
/// relation (e.g. the closed-form eigenvector construction degenerates).
struct NotAnEigenvalueError : InvalidInputError {
    explicit NotAnEigenvalueError(const std::string& msg)
        : InvalidInputError(msg) {}
};

/// Thrown when a regression/fit does not have enough usable points.
struct InsufficientDataError : InvalidInputError {
    explicit InsufficientDataError(const std::string& msg)
        : InvalidInputError(msg) {}
};

} // namespace dimerspec
