#pragma once

#include <stdexcept>
#include <string>

namespace dpnp {

/// Base class of every error raised by the solver library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad sizes, nonpositive coefficients, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Pure-Neumann data whose sources and boundary fluxes do not balance.
class CompatibilityViolation : public Error {
public:
    CompatibilityViolation(const std::string& what, double imbalance)
        : Error(what), imbalance_(imbalance) {}
    double imbalance() const noexcept { return imbalance_; }

private:
    double imbalance_;
};

/// A linear solve failed (iteration cap reached or a vanishing pivot).
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// The outer Gauss/Darcy/transport iteration did not settle within its cap.
class OuterNonConvergence : public NonConvergence {
public:
    using NonConvergence::NonConvergence;
};

/// A transport solve produced a concentration below the rounding threshold.
class NegativeConcentration : public Error {
public:
    using Error::Error;
};

/// Scenario/config file problems; the message carries `file:line:`.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace dpnp
