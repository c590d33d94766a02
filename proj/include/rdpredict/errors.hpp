#pragma once

#include <stdexcept>
#include <string>

namespace rdpredict {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration. Carries the offending key path.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Inputs that violate a documented precondition (bad coefficients, poles,
/// dimensions, positions outside the domain).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class DomainError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// A numerical procedure could not deliver a trustworthy result.
class NumericalError : public Error {
public:
    using Error::Error;
};

class BracketingError : public NumericalError {
public:
    BracketingError(const std::string& what, double lambda_low, double lambda_high)
        : NumericalError(what), low_(lambda_low), high_(lambda_high) {}

    double lambda_low() const noexcept { return low_; }
    double lambda_high() const noexcept { return high_; }

private:
    double low_;
    double high_;
};

/// History queried outside its retention window. Indicates a sizing bug.
class OutOfWindowError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StepSizeError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, double time)
        : NumericalError(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace rdpredict
