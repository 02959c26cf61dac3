#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "gridflux/netlist/elaborate.hpp"
#include "gridflux/netlist/tape.hpp"

namespace gridflux::mna {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Unknown ordering: non-ground node voltages, then one auxiliary current
/// per voltage source (V cards and V= B-sources), then one per inductor.
/// Each group follows document order.
struct SystemLayout {
    std::size_t n_nodes = 0;
    std::size_t n_aux = 0;
    std::size_t total = 0;
    std::vector<std::string> var_names;

    /// Case-insensitive lookup of "V(node)" / "I(device)".
    std::optional<std::size_t> index_of(std::string_view var_name) const;
    /// Unknown holding the voltage of circuit node `node` (nullopt for ground).
    std::optional<std::size_t> node_var(std::size_t node) const {
        if (node == 0) return std::nullopt;
        return node - 1;
    }
    /// Auxiliary unknown of a voltage source or inductor.
    std::optional<std::size_t> aux_of(std::string_view device) const;

    std::unordered_map<std::string, std::size_t> lookup;      // lower-cased var name -> index
    std::unordered_map<std::string, std::size_t> aux_lookup;  // lower-cased device name -> index
};

/// Throws CircuitError("empty circuit") when there is no non-ground node.
SystemLayout build_layout(const netlist::FlatCircuit& c);

struct EvalOptions {
    /// Multiplies every independent V-source value (DC continuation).
    double source_scale = 1.0;
    /// Operating-point form: capacitor and inductor IC= values are imposed.
    bool operating_point = false;
};

/// f(x, dx/dt, t) = f_static(x, t) + dq(x)/dt in modified nodal form.
/// f_static rows of KCL equations are the sum of currents leaving the node
/// through its devices. Immutable after construction; all methods are const
/// and reentrant.
class DaeSystem {
public:
    DaeSystem(const netlist::FlatCircuit& c, SystemLayout layout);

    const SystemLayout& layout() const { return layout_; }
    std::size_t size() const { return layout_.total; }
    /// True when no B-source is present (affine residual, constant Jacobian).
    bool is_linear() const { return behavioral_.empty(); }

    Vector f_static(const Vector& x, double t, const EvalOptions& opts = {}) const;
    Vector q(const Vector& x) const;
    /// dF_static/dx.
    Matrix g_matrix(const Vector& x, double t, const EvalOptions& opts = {}) const;
    /// dq/dx (constant: capacitors and inductors are linear).
    const Matrix& c_matrix() const { return c_; }

    Vector residual(const Vector& x, const Vector& xdot, double t) const;
    Matrix jacobian(const Vector& x, double t, double alpha, const EvalOptions& opts = {}) const;

    /// f_static and (optionally) its Jacobian in one pass. `g` may be null.
    void evaluate(const Vector& x, double t, const EvalOptions& opts, Vector& f, Matrix* g) const;

    /// Values of every V(...)/I(...) reference at x, for evaluating
    /// expressions outside the solver.
    netlist::Bindings bindings(const Vector& x) const;

    struct Behavioral {
        std::string name;
        netlist::BMode mode;
        std::optional<std::size_t> a, b;  // unknowns of the two nodes
        std::optional<std::size_t> aux;   // V= sources
        netlist::Tape value;
        std::vector<std::pair<std::size_t, netlist::Tape>> partials;  // (unknown, d value / d unknown)
    };
    const std::vector<Behavioral>& behavioral() const { return behavioral_; }

private:
    SystemLayout layout_;
    Matrix g_lin_;     // R, V-source and inductor incidence
    Matrix g_lin_op_;  // same with IC rows / penalties for the operating point
    Matrix c_;
    Vector b_src_;     // independent source values (scaled by source_scale)
    Vector b_op_;      // IC contributions at the operating point
    std::vector<Behavioral> behavioral_;
};

/// Convenience: build_layout + DaeSystem.
DaeSystem stamp_all(const netlist::FlatCircuit& c, const SystemLayout& layout);

/// Conductance of the penalty that pins a capacitor's IC at the operating point.
inline constexpr double kIcPenalty = 1e12;

}  // namespace gridflux::mna
