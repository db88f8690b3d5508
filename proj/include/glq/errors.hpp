#pragma once

#include <stdexcept>
#include <string>

namespace glq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

/// A Pochhammer denominator (or a negative-order numerator) vanished.
class PoleError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "PoleError"; }
};

/// Argument outside the radius of convergence of a series.
class DivergenceError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "DivergenceError"; }
};

/// Series terms do not decay in at least one summation direction.
class NonConvergenceError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "NonConvergence"; }
};

/// Parameters violate the convergence conditions of an integral.
class DomainError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "DomainError"; }
};

class ZeroArgumentError : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "ZeroArgument"; }
};

/// Caller broke a documented precondition (negative factorial, index past cutoff, ...).
class ContractViolation : public Error
{
public:
    using Error::Error;
    const char* kind() const noexcept override { return "ContractViolation"; }
};

} // namespace glq
