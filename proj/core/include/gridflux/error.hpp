#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridflux {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed netlist text. Carries the 1-based line and the offending token.
class ParseError : public Error {
public:
    ParseError(std::size_t line, std::string token, const std::string& message);

    std::size_t line() const noexcept { return line_; }
    const std::string& token() const noexcept { return token_; }

private:
    std::size_t line_;
    std::string token_;
};

/// Subcircuit expansion or parameter substitution failed.
class ElaborationError : public Error {
public:
    using Error::Error;
};

/// An expression could not be evaluated (unbound reference, 1/0, acos out of range).
class DomainError : public Error {
public:
    DomainError(const std::string& message, std::string subexpression);

    const std::string& subexpression() const noexcept { return subexpression_; }

private:
    std::string subexpression_;
};

class UnboundReferenceError : public DomainError {
public:
    explicit UnboundReferenceError(const std::string& reference);
};

/// Circuit cannot be turned into equations (empty circuit, bad stamp).
class CircuitError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class SingularJacobianError : public SolverError {
public:
    explicit SingularJacobianError(double t);
    double time() const noexcept { return t_; }

private:
    double t_;
};

class NonConvergenceError : public SolverError {
public:
    NonConvergenceError(double t, int iterations, double last_dx);
    double time() const noexcept { return t_; }
    int iterations() const noexcept { return iterations_; }
    double last_dx() const noexcept { return last_dx_; }

private:
    double t_;
    int iterations_;
    double last_dx_;
};

}  // namespace gridflux
