#include "gridflux/error.hpp"

#include <fmt/format.h>

namespace gridflux {

ParseError::ParseError(std::size_t line, std::string token, const std::string& message)
    : Error(fmt::format("line {}: {} (at '{}')", line, message, token)),
      line_(line),
      token_(std::move(token)) {}

DomainError::DomainError(const std::string& message, std::string subexpression)
    : Error(message), subexpression_(std::move(subexpression)) {}

UnboundReferenceError::UnboundReferenceError(const std::string& reference)
    : DomainError(fmt::format("unbound reference {}", reference), reference) {}

SingularJacobianError::SingularJacobianError(double t)
    : SolverError(fmt::format("singular Jacobian at t={:.9g}", t)), t_(t) {}

NonConvergenceError::NonConvergenceError(double t, int iterations, double last_dx)
    : SolverError(fmt::format("Newton failed to converge at t={:.9g} after {} iterations "
                              "(last |dx|_inf = {:.3e})",
                              t, iterations, last_dx)),
      t_(t),
      iterations_(iterations),
      last_dx_(last_dx) {}

}  // namespace gridflux
