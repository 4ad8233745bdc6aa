#pragma once

#include <stdexcept>
#include <string>

namespace granoise {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (negative counts, Q < -1, ...).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Scenario / configuration problems. Maps to CLI exit code 2.
class ConfigError : public Error {
  public:
    using Error::Error;
};

class SingularityError : public Error {
  public:
    using Error::Error;
};

/// Steady-state Liouvillian too ill-conditioned to trust.
class SolverError : public Error {
  public:
    SolverError(const std::string& what, double condition_number)
        : Error(what), condition_number_(condition_number) {}
    double condition_number() const { return condition_number_; }

  private:
    double condition_number_;
};

class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, double previous, double last)
        : Error(what), previous_(previous), last_(last) {}
    double previous_estimate() const { return previous_; }
    double last_estimate() const { return last_; }

  private:
    double previous_;
    double last_;
};

/// Mean signal too flat in the microwave Rabi frequency for slope detection.
class FlatSlopeError : public Error {
  public:
    using Error::Error;
};

class BracketError : public Error {
  public:
    BracketError(const std::string& what, double f_low, double f_high)
        : Error(what), f_low_(f_low), f_high_(f_high) {}
    double f_low() const { return f_low_; }
    double f_high() const { return f_high_; }

  private:
    double f_low_;
    double f_high_;
};

/// A Poisson draw produced zero atoms in the probe volume.
class EmptyVolumeError : public Error {
  public:
    using Error::Error;
};

}  // namespace granoise
