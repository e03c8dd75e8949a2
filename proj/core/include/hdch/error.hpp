#pragma once

#include <stdexcept>
#include <string>

namespace hdch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration (bad grid, violated hypothesis, unknown key).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The computation itself failed: blow-up or loss of resolution.
class NumericalError : public Error {
public:
    using Error::Error;
};

class BlowUpError : public NumericalError {
public:
    BlowUpError(const std::string& what, double time) : NumericalError(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Spectral energy above the dealiasing cutoff exceeded the tolerated fraction.
class UnresolvedFieldError : public NumericalError {
public:
    UnresolvedFieldError(const std::string& what, double tail_fraction)
        : NumericalError(what), tail_fraction_(tail_fraction) {}
    double tail_fraction() const noexcept { return tail_fraction_; }

private:
    double tail_fraction_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace hdch
