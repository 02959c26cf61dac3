#include <cmath>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gridflux/error.hpp"
#include "gridflux/solver/solver.hpp"
#include "../netlist/text_util.hpp"

namespace gridflux::solver {

SystemState bdf1_step(const mna::DaeSystem& sys, const SystemState& state, double h, const SolverOptions& opts) {
    if (!(h > 0.0)) throw std::invalid_argument(fmt::format("time step must be positive, got {}", h));
    const double t_new = state.t + h;
    const Vector history = -(sys.c_matrix() * state.x) / h;
    auto r = newton_solve(sys, state.x, t_new, 1.0 / h, history, opts);
    SystemState next;
    next.t = t_new;
    next.x_prev = state.x;
    next.x = std::move(r.x);
    next.newton_iters_last = r.iterations;
    return next;
}

void WaveformSet::add_column(std::string name) { columns_.emplace_back(std::move(name), std::vector<double>{}); }

const std::vector<double>* WaveformSet::find(std::string_view name) const {
    for (const auto& [n, v] : columns_) {
        if (netlist::detail::iequals(n, name)) return &v;
    }
    return nullptr;
}

std::vector<double> time_grid(double step_h, double t_stop) {
    std::vector<double> t{0.0};
    if (t_stop <= 0.0) return t;
    // A step count within round-off of an integer is that integer.
    const auto n = static_cast<long>(std::floor(t_stop / step_h * (1.0 + 1e-12)));
    t.reserve(static_cast<std::size_t>(n) + 2);
    for (long i = 1; i <= n; ++i) t.push_back(static_cast<double>(i) * step_h);
    if (std::fabs(t.back() - t_stop) <= 1e-9 * step_h) {
        t.back() = t_stop;
    } else if (t.back() < t_stop) {
        t.push_back(t_stop);
    }
    return t;
}

TransientStats integrate(const mna::DaeSystem& sys, const SolverOptions& opts, const Observer& observe) {
    opts.validate();
    TransientStats stats;
    stats.dc = dc_operating_point(sys, opts);
    SystemState state;
    state.x = stats.dc.x;
    state.x_prev = state.x;
    state.newton_iters_last = stats.dc.iterations;
    if (observe) observe(state);

    const auto grid = time_grid(opts.step_h, opts.t_stop);
    for (std::size_t n = 1; n < grid.size(); ++n) {
        try {
            state = bdf1_step(sys, state, grid[n] - state.t, opts);
        } catch (const DomainError& e) {
            throw SolverError(fmt::format("at t={}: {}", grid[n], e.what()));
        }
        state.t = grid[n];
        ++stats.steps;
        stats.newton_iterations += state.newton_iters_last;
        if (observe) observe(state);
    }
    spdlog::debug("transient: {} steps, {} Newton iterations", stats.steps, stats.newton_iterations);
    return stats;
}

WaveformSet run_transient(const mna::DaeSystem& sys, const SolverOptions& opts,
                          const std::vector<std::string>& print_vars, TransientStats* stats) {
    std::vector<std::size_t> idx;
    WaveformSet w;
    for (const auto& v : print_vars) {
        auto i = sys.layout().index_of(v);
        if (!i) throw std::invalid_argument("unknown output variable " + v);
        idx.push_back(*i);
        w.add_column(sys.layout().var_names[*i]);
    }
    const auto expected = time_grid(opts.step_h, opts.t_stop).size();
    w.times.reserve(expected);
    for (std::size_t c = 0; c < idx.size(); ++c) w.column(c).reserve(expected);
    auto s = integrate(sys, opts, [&](const SystemState& st) {
        w.times.push_back(st.t);
        for (std::size_t c = 0; c < idx.size(); ++c) w.column(c).push_back(st.x[static_cast<Eigen::Index>(idx[c])]);
    });
    if (stats) *stats = s;
    return w;
}

}  // namespace gridflux::solver
