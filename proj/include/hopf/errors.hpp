#pragma once

#include <stdexcept>
#include <string>

namespace hopf {

// Validation failures (bad parameters, bad grids) are reported with
// std::invalid_argument. Everything below signals a numerical failure of an
// otherwise well-posed computation.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BlowUpError : public NumericalError {
public:
    BlowUpError(double time, double norm)
        : NumericalError("blow-up: |z| = " + std::to_string(norm) + " at t = " + std::to_string(time)),
          time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class TangentBlowUpError : public NumericalError {
public:
    explicit TangentBlowUpError(double time)
        : NumericalError("tangent blow-up at t = " + std::to_string(time)) {}
};

class BoundUndefinedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoDecayError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace hopf
