#include <cmath>
#include <limits>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "gridflux/error.hpp"
#include "gridflux/solver/solver.hpp"

namespace gridflux::solver {

void SolverOptions::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(newton_tol > 0.0)) {
        throw std::invalid_argument("solver tolerances must be positive");
    }
    if (!(step_h > 0.0)) throw std::invalid_argument("step size must be positive");
    if (max_newton_iters < 1) throw std::invalid_argument("max_newton_iters must be at least 1");
    if (!(t_stop >= 0.0)) throw std::invalid_argument("t_stop must be non-negative");
}

namespace {

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

// Column-then-row equilibration, so that the pivot test below does not
// mistake badly scaled but regular rows (a load at its denominator floor)
// for a singular matrix. Empty rows or columns are reported as singular.
struct Scaling {
    Vector row, col;
};

bool equilibrate(Matrix& j, Scaling& s) {
    s.col = j.cwiseAbs().colwise().maxCoeff().transpose();
    if (!s.col.allFinite() || s.col.minCoeff() == 0.0) return false;
    s.col = s.col.cwiseInverse();
    j = j * s.col.asDiagonal();
    s.row = j.cwiseAbs().rowwise().maxCoeff();
    if (s.row.minCoeff() == 0.0) return false;
    s.row = s.row.cwiseInverse();
    j = s.row.asDiagonal() * j;
    return true;
}

// PartialPivLU does not report rank; a zero or vanishing pivot of the
// equilibrated matrix is the signature of a floating node or a loop of
// ideal sources.
bool singular(const Eigen::PartialPivLU<Matrix>& lu) {
    const auto diag = lu.matrixLU().diagonal().cwiseAbs();
    const double largest = diag.maxCoeff();
    if (!std::isfinite(largest) || largest == 0.0) return true;
    return diag.minCoeff() <= largest * 1e-20;
}

}  // namespace

NewtonResult newton_solve(const mna::DaeSystem& sys, const Vector& x0, double t, double alpha,
                          const Vector& history, const SolverOptions& opts, const mna::EvalOptions& eval) {
    const auto n = static_cast<Eigen::Index>(sys.size());
    NewtonResult r;
    r.x = x0;
    Vector f(n);
    Matrix j(n, n);
    const Matrix& c = sys.c_matrix();
    const bool reactive = alpha != 0.0;

    auto residual = [&](bool with_jacobian) {
        sys.evaluate(r.x, t, eval, f, with_jacobian ? &j : nullptr);
        if (reactive) f.noalias() += alpha * (c * r.x);
        if (history.size() != 0) f += history;
    };

    residual(true);
    double fnorm = inf_norm(f);
    r.last_dx = std::numeric_limits<double>::infinity();
    Eigen::PartialPivLU<Matrix> lu;
    Scaling scale;
    for (int k = 1; k <= opts.max_newton_iters; ++k) {
        if (reactive) j += alpha * c;
        if (!equilibrate(j, scale)) throw SingularJacobianError(t);
        lu.compute(j);
        if (singular(lu)) throw SingularJacobianError(t);
        const Vector dx = scale.col.cwiseProduct(lu.solve(-scale.row.cwiseProduct(f)));
        if (!dx.allFinite()) throw SingularJacobianError(t);
        r.x += dx;
        r.iterations = k;
        r.last_dx = inf_norm(dx);

        residual(true);
        const double prev = fnorm;
        fnorm = inf_norm(f);
        const bool small_residual = fnorm < opts.abs_tol + opts.rel_tol * inf_norm(r.x);
        const bool settled = r.last_dx < opts.newton_tol || fnorm <= 1e-12 * std::max(1.0, prev);
        spdlog::trace("newton t={} k={} |dx|={:.3e} |f|={:.3e}", t, k, r.last_dx, fnorm);
        if (small_residual && settled) {
            r.residual = fnorm;
            return r;
        }
    }
    throw NonConvergenceError(t, r.iterations, r.last_dx);
}

namespace {

// Backward Euler on the circuit's own dynamics from the flat start, with a
// step that grows while Newton is easy and shrinks on failure, until the
// state stops moving. A final alpha=0 solve polishes the result. Meant for
// controller loops whose DC equations have kinks (clamps) that trap plain
// Newton in a cycle.
Vector pseudo_transient(const mna::DaeSystem& sys, const SolverOptions& opts, const mna::EvalOptions& eval,
                        int& iterations) {
    const Vector none;
    Vector x = flat_start(sys.layout());
    double h = 1e-3;
    for (int k = 0; k < 2000; ++k) {
        const Vector history = -(sys.c_matrix() * x) / h;
        try {
            auto r = newton_solve(sys, x, 0.0, 1.0 / h, history, opts, eval);
            iterations += r.iterations;
            const double moved = inf_norm(r.x - x);
            x = std::move(r.x);
            if (moved < 1e-10 * std::max(1.0, inf_norm(x)) || h > 1e6) break;
            if (r.iterations <= 3) h *= 2.0;
        } catch (const SolverError&) {
            h /= 4.0;
            if (h < 1e-9) throw;
        } catch (const DomainError&) {
            h /= 4.0;
            if (h < 1e-9) throw;
        }
    }
    auto r = newton_solve(sys, x, 0.0, 0.0, none, opts, eval);
    iterations += r.iterations;
    return r.x;
}

}  // namespace

Vector flat_start(const mna::SystemLayout& layout) {
    Vector x = Vector::Zero(static_cast<Eigen::Index>(layout.total));
    for (std::size_t i = 0; i < layout.n_nodes; ++i) {
        const std::string& name = layout.var_names[i];  // "V(node)"
        const char last = name[name.size() - 2];
        if (last == 'R' || last == 'r') x[static_cast<Eigen::Index>(i)] = 1.0;
    }
    return x;
}

DcResult dc_operating_point(const mna::DaeSystem& sys, const SolverOptions& opts) {
    const Vector none;
    mna::EvalOptions eval;
    eval.operating_point = true;
    DcResult out;
    try {
        auto r = newton_solve(sys, flat_start(sys.layout()), 0.0, 0.0, none, opts, eval);
        out.x = std::move(r.x);
        out.iterations = r.iterations;
        return out;
    } catch (const SolverError& e) {
        spdlog::info("operating point from flat start failed ({}); retrying with source ramping", e.what());
    } catch (const DomainError& e) {
        spdlog::info("operating point from flat start failed ({}); retrying with source ramping", e.what());
    }
    out.ramped = true;
    try {
        Vector x = flat_start(sys.layout());
        for (int s = 1; s <= 10; ++s) {
            eval.source_scale = s / 10.0;
            auto r = newton_solve(sys, x, 0.0, 0.0, none, opts, eval);
            x = std::move(r.x);
            out.iterations += r.iterations;
        }
        out.x = std::move(x);
        return out;
    } catch (const SolverError& e) {
        spdlog::info("source ramping failed ({}); trying pseudo-transient continuation", e.what());
    } catch (const DomainError& e) {
        spdlog::info("source ramping failed ({}); trying pseudo-transient continuation", e.what());
    }
    eval.source_scale = 1.0;
    out.x = pseudo_transient(sys, opts, eval, out.iterations);
    return out;
}

}  // namespace gridflux::solver
