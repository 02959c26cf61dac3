#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridflux/mna/dae_system.hpp"

namespace gridflux::solver {

using mna::Matrix;
using mna::Vector;

struct SolverOptions {
    double rel_tol = 1e-1;
    double abs_tol = 1e-3;
    double newton_tol = 1e-3;  // infinity norm of the Newton update
    int max_newton_iters = 50;
    double step_h = 1e-2;
    double t_stop = 0.0;

    /// Throws std::invalid_argument on a violated invariant.
    void validate() const;
};

struct SystemState {
    double t = 0.0;
    Vector x;
    Vector x_prev;
    int newton_iters_last = 0;
};

struct NewtonResult {
    Vector x;
    int iterations = 0;
    double last_dx = 0.0;
    double residual = 0.0;
};

/// Solves f_static(x, t) + alpha*q(x) + history = 0.
///
/// Converged when |F(x)|_inf < abs_tol + rel_tol*|x|_inf and either the last
/// update satisfied |dx|_inf < newton_tol or the update reduced the residual
/// to round-off (which makes affine systems finish in one iteration).
NewtonResult newton_solve(const mna::DaeSystem& sys, const Vector& x0, double t, double alpha,
                          const Vector& history, const SolverOptions& opts, const mna::EvalOptions& eval = {});

/// Initial guess for the operating point: 1 for node voltages whose name ends
/// in 'R', 0 for everything else.
Vector flat_start(const mna::SystemLayout& layout);

struct DcResult {
    Vector x;
    int iterations = 0;
    bool ramped = false;  // a fallback (ramping or pseudo-transient) was needed
};

/// Solves f_static(x, 0) = 0 (IC= values imposed) from the flat start, falling
/// back to source ramping over 0.1, 0.2, ..., 1.0 and then to pseudo-transient
/// continuation (backward Euler with a growing step until the state settles).
DcResult dc_operating_point(const mna::DaeSystem& sys, const SolverOptions& opts);

/// One backward-Euler step of size h from `state`.
SystemState bdf1_step(const mna::DaeSystem& sys, const SystemState& state, double h, const SolverOptions& opts);

/// Ordered named columns sharing a time axis.
class WaveformSet {
public:
    std::vector<double> times;

    void add_column(std::string name);
    std::size_t column_count() const { return columns_.size(); }
    const std::string& name(std::size_t i) const { return columns_[i].first; }
    const std::vector<double>& column(std::size_t i) const { return columns_[i].second; }
    std::vector<double>& column(std::size_t i) { return columns_[i].second; }
    /// Case-insensitive; nullptr when absent.
    const std::vector<double>* find(std::string_view name) const;
    std::size_t rows() const { return times.size(); }

private:
    std::vector<std::pair<std::string, std::vector<double>>> columns_;
};

/// Accepted time points t_n = n*h (the final step is clamped to t_stop).
std::vector<double> time_grid(double step_h, double t_stop);

struct TransientStats {
    std::size_t steps = 0;
    long newton_iterations = 0;
    DcResult dc;
};

using Observer = std::function<void(const SystemState&)>;

/// DC operating point, then fixed-step BDF1 to opts.t_stop. `observe` is
/// called for every accepted point including t = 0.
TransientStats integrate(const mna::DaeSystem& sys, const SolverOptions& opts, const Observer& observe);

/// integrate() recording the named unknowns.
WaveformSet run_transient(const mna::DaeSystem& sys, const SolverOptions& opts,
                          const std::vector<std::string>& print_vars, TransientStats* stats = nullptr);

}  // namespace gridflux::solver
