#pragma once

#include <stdexcept>
#include <string>

namespace wfr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// NaN/Inf or otherwise malformed numeric input.
class NumericInputError : public Error {
public:
    using Error::Error;
};

/// SPD matrix whose smallest eigenvalue is below tolerance.
class SingularMatrixError : public Error {
public:
    using Error::Error;
};

/// Precondition violated (dimension mismatch, negative time, non-SPD init, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A resolvent inside a closed form is singular. Carries the offending eigenvalue.
class SingularConfigurationError : public Error {
public:
    SingularConfigurationError(const std::string& what, double eigenvalue)
        : Error(what + " (eigenvalue " + std::to_string(eigenvalue) + ")"), eigenvalue_(eigenvalue) {}
    double eigenvalue() const { return eigenvalue_; }

private:
    double eigenvalue_;
};

/// Time integration lost stability or positivity; retry with a smaller step.
class StepSizeError : public Error {
public:
    using Error::Error;
};

/// Grid density underflowed to zero everywhere.
class DegenerateDensityError : public Error {
public:
    using Error::Error;
};

/// A divergence came out clearly negative.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Assumption 4.2(a) fails (alpha_d <= 0).
class AssumptionViolation : public Error {
public:
    using Error::Error;
};

/// Admissibility b^2 < alpha_pi/2 fails.
class ConditionViolation : public Error {
public:
    using Error::Error;
};

/// Asymptotic ratio undefined (0/0).
class DegenerateRatioError : public Error {
public:
    using Error::Error;
};

/// Bad configuration file or override.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace wfr
