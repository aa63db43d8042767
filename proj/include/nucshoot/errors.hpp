#pragma once

#include <stdexcept>
#include <string>

namespace nucshoot {

// Base for every failure raised by the library. Each subclass maps onto one
// CLI exit code (see cli.hpp).
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Arguments outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// The radial field was evaluated at r = 0.
class SingularityError : public Error {
  public:
    using Error::Error;
};

/// Step size underflow during adaptive integration.
class StiffnessError : public Error {
  public:
    StiffnessError(const std::string& what, double radius) : Error(what), radius_(radius) {}
    double radius() const noexcept { return radius_; }

  private:
    double radius_;
};

/// No shot outside the set I was found below 1 - delta.
class BracketError : public Error {
  public:
    using Error::Error;
};

/// Bisection could not resolve a midpoint even at the largest horizon.
class PrecisionExhaustedError : public Error {
  public:
    PrecisionExhaustedError(const std::string& what, double x_lo, double x_hi)
        : Error(what), x_lo_(x_lo), x_hi_(x_hi) {}
    double x_lo() const noexcept { return x_lo_; }
    double x_hi() const noexcept { return x_hi_; }

  private:
    double x_lo_;
    double x_hi_;
};

class NotDecayingError : public Error {
  public:
    using Error::Error;
};

/// Angle lift requested along a trajectory that passes through (0,0).
class UndefinedLiftError : public Error {
  public:
    using Error::Error;
};

class InsufficientHorizonError : public Error {
  public:
    using Error::Error;
};

class DivergentNormError : public Error {
  public:
    using Error::Error;
};

} // namespace nucshoot
