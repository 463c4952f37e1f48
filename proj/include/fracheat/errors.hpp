#pragma once

#include <stdexcept>
#include <string>

namespace fracheat {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A series or representation was asked for an argument beyond its declared guard.
class OutOfRangeError : public std::out_of_range {
public:
    OutOfRangeError(const std::string& what, double limit)
        : std::out_of_range(what), limit_(limit) {}
    double limit() const noexcept { return limit_; }

private:
    double limit_;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double partial, double error_estimate)
        : std::runtime_error(what), partial_(partial), error_estimate_(error_estimate) {}
    explicit ConvergenceError(const std::string& what)
        : ConvergenceError(what, 0.0, 0.0) {}
    double partial_value() const noexcept { return partial_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double partial_;
    double error_estimate_;
};

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace fracheat
