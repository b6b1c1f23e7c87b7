#pragma once

#include <stdexcept>
#include <string>

namespace nlskam
{

// Base class for failures that a caller is expected to handle. Contract
// violations on arguments use std::invalid_argument / std::domain_error.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-range run configuration (CLI exit code 2).
class ConfigError : public Error
{
public:
    ConfigError(const std::string &field, const std::string &what, int line = -1)
        : Error(line >= 0 ? field + " (line " + std::to_string(line) + "): " + what : field + ": " + what),
          field_(field), line_(line)
    {
    }

    const std::string &field() const noexcept { return field_; }
    int line() const noexcept { return line_; }

private:
    std::string field_;
    int line_;
};

// The computation cannot proceed without silently producing garbage
// (resonance, divergence, lost contraction). CLI exit code 3.
class NumericalError : public Error
{
public:
    using Error::Error;
};

class SmallDivisorError : public NumericalError
{
public:
    SmallDivisorError(const std::string &what, std::string monomial, double divisor, double floor)
        : NumericalError(what), monomial_(std::move(monomial)), divisor_(divisor), floor_(floor)
    {
    }

    const std::string &monomial() const noexcept { return monomial_; }
    double divisor() const noexcept { return divisor_; }
    double floor() const noexcept { return floor_; }

private:
    std::string monomial_;
    double divisor_;
    double floor_;
};

// File system / serialization failures (CLI exit code 4).
class IoError : public Error
{
public:
    using Error::Error;
};

} // namespace nlskam
