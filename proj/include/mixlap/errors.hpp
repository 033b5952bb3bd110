#pragma once

#include <stdexcept>
#include <string>

namespace mixlap {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Mismatched shapes or grids between operands.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure stopped before meeting its tolerance.
/// Carries the error estimate that was achieved.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double achieved_error)
        : std::runtime_error(what), achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

/// Iterate collapsed to a nonpositive field; the fixed-point map is undefined.
class DegenerateIterateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iteration exhausted its budget without converging.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mixlap
