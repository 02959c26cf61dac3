#include "gridflux/mna/dae_system.hpp"

#include <cassert>

#include <fmt/format.h>

#include "gridflux/error.hpp"

namespace gridflux::mna {

using netlist::BMode;
using netlist::DeviceKind;
using netlist::Reference;

namespace {

// Adds the +g/-g two-terminal pattern between unknowns a and b.
void stamp_pair(Matrix& m, std::optional<std::size_t> a, std::optional<std::size_t> b, double g) {
    if (a) m(*a, *a) += g;
    if (b) m(*b, *b) += g;
    if (a && b) {
        m(*a, *b) -= g;
        m(*b, *a) -= g;
    }
}

// Branch current k leaving node a and entering node b, and the branch
// voltage Va - Vb in row k.
void stamp_incidence(Matrix& m, std::optional<std::size_t> a, std::optional<std::size_t> b, std::size_t k) {
    if (a) {
        m(*a, k) += 1.0;
        m(k, *a) += 1.0;
    }
    if (b) {
        m(*b, k) -= 1.0;
        m(k, *b) -= 1.0;
    }
}

}  // namespace

DaeSystem::DaeSystem(const netlist::FlatCircuit& c, SystemLayout layout) : layout_(std::move(layout)) {
    const auto n = static_cast<Eigen::Index>(layout_.total);
    g_lin_ = Matrix::Zero(n, n);
    c_ = Matrix::Zero(n, n);
    b_src_ = Vector::Zero(n);
    b_op_ = Vector::Zero(n);
    Matrix op_delta = Matrix::Zero(n, n);

    // Slot `total` of the tape inputs is a constant 0 standing in for ground.
    const std::size_t ground_slot = layout_.total;
    auto slot_of = [&](const Reference& ref) -> std::size_t {
        if (ref.kind == Reference::Kind::Voltage) {
            auto node = c.find_node(ref.name);
            if (!node) throw UnboundReferenceError(ref.to_string());
            return *node == 0 ? ground_slot : *layout_.node_var(*node);
        }
        if (ref.kind == Reference::Kind::Current) {
            auto k = layout_.aux_of(ref.name);
            if (!k) throw UnboundReferenceError(ref.to_string());
            return *k;
        }
        throw UnboundReferenceError(ref.to_string());
    };

    for (const auto& d : c.instances) {
        assert(d.nodes.size() == 2 && d.nodes[0] < c.node_count() && d.nodes[1] < c.node_count());
        const auto a = layout_.node_var(d.nodes[0]);
        const auto b = layout_.node_var(d.nodes[1]);
        switch (d.kind) {
            case DeviceKind::Resistor:
                if (d.value == 0.0) throw CircuitError("resistor " + d.name + " has zero resistance");
                stamp_pair(g_lin_, a, b, 1.0 / d.value);
                break;
            case DeviceKind::Capacitor:
                stamp_pair(c_, a, b, d.value);
                if (d.ic) {
                    stamp_pair(op_delta, a, b, kIcPenalty);
                    if (a) b_op_[*a] += kIcPenalty * *d.ic;
                    if (b) b_op_[*b] -= kIcPenalty * *d.ic;
                }
                break;
            case DeviceKind::VSource: {
                const std::size_t k = *layout_.aux_of(d.name);
                stamp_incidence(g_lin_, a, b, k);
                b_src_[k] = d.value;
                break;
            }
            case DeviceKind::Inductor: {
                const std::size_t k = *layout_.aux_of(d.name);
                stamp_incidence(g_lin_, a, b, k);
                c_(k, k) -= d.value;
                if (d.ic) b_op_[k] = *d.ic;
                break;
            }
            case DeviceKind::BSource: {
                Behavioral beh{d.name, d.b_mode, a, b, std::nullopt, {}, {}};
                if (d.b_mode == BMode::Voltage) {
                    beh.aux = *layout_.aux_of(d.name);
                    stamp_incidence(g_lin_, a, b, *beh.aux);
                }
                try {
                    beh.value = netlist::Tape::compile(d.expr, slot_of);
                    for (const auto& ref : netlist::collect_references(d.expr)) {
                        const std::size_t slot = slot_of(ref);
                        if (slot == ground_slot) continue;
                        const netlist::Expr partial = netlist::differentiate(d.expr, ref);
                        if (partial.is_number() && partial.value() == 0.0) continue;
                        beh.partials.emplace_back(slot, netlist::Tape::compile(partial, slot_of));
                    }
                } catch (const DomainError& e) {
                    throw CircuitError(fmt::format("{}: {}", d.name, e.what()));
                }
                behavioral_.push_back(std::move(beh));
                break;
            }
            case DeviceKind::Instance:
                throw CircuitError("unexpanded subcircuit instance " + d.name);
        }
    }
    g_lin_op_ = g_lin_ + op_delta;
    // Inductor IC rows replace the branch equation rather than adding to it.
    for (const auto& d : c.instances) {
        if (d.kind != DeviceKind::Inductor || !d.ic) continue;
        const auto k = static_cast<Eigen::Index>(*layout_.aux_of(d.name));
        g_lin_op_.row(k).setZero();
        g_lin_op_(k, k) = 1.0;
    }
}

void DaeSystem::evaluate(const Vector& x, double /*t*/, const EvalOptions& opts, Vector& f, Matrix* g) const {
    assert(static_cast<std::size_t>(x.size()) == layout_.total);
    const Matrix& lin = opts.operating_point ? g_lin_op_ : g_lin_;
    f.noalias() = lin * x;
    f -= opts.source_scale * b_src_;
    if (opts.operating_point) f -= b_op_;
    if (g) *g = lin;
    if (behavioral_.empty()) return;

    std::vector<double> slots(layout_.total + 1, 0.0);
    for (std::size_t i = 0; i < layout_.total; ++i) slots[i] = x[static_cast<Eigen::Index>(i)];
    for (const auto& beh : behavioral_) {
        try {
            const double v = beh.value.eval(slots);
            if (beh.mode == BMode::Current) {
                if (beh.a) f[*beh.a] += v;
                if (beh.b) f[*beh.b] -= v;
                if (g) {
                    for (const auto& [j, tape] : beh.partials) {
                        const double dv = tape.eval(slots);
                        if (beh.a) (*g)(*beh.a, j) += dv;
                        if (beh.b) (*g)(*beh.b, j) -= dv;
                    }
                }
            } else {
                f[*beh.aux] -= v;
                if (g) {
                    for (const auto& [j, tape] : beh.partials) (*g)(*beh.aux, j) -= tape.eval(slots);
                }
            }
        } catch (const DomainError& e) {
            throw DomainError(fmt::format("{}: {}", beh.name, e.what()), e.subexpression());
        }
    }
}

Vector DaeSystem::f_static(const Vector& x, double t, const EvalOptions& opts) const {
    Vector f(x.size());
    evaluate(x, t, opts, f, nullptr);
    return f;
}

Vector DaeSystem::q(const Vector& x) const { return c_ * x; }

Matrix DaeSystem::g_matrix(const Vector& x, double t, const EvalOptions& opts) const {
    Vector f(x.size());
    Matrix g;
    evaluate(x, t, opts, f, &g);
    return g;
}

Vector DaeSystem::residual(const Vector& x, const Vector& xdot, double t) const {
    Vector f(x.size());
    evaluate(x, t, {}, f, nullptr);
    f.noalias() += c_ * xdot;
    return f;
}

Matrix DaeSystem::jacobian(const Vector& x, double t, double alpha, const EvalOptions& opts) const {
    Matrix g = g_matrix(x, t, opts);
    if (alpha != 0.0) g += alpha * c_;
    return g;
}

netlist::Bindings DaeSystem::bindings(const Vector& x) const {
    netlist::Bindings b;
    b.set_voltage("0", 0.0);
    for (std::size_t i = 0; i < layout_.total; ++i) {
        const std::string& name = layout_.var_names[i];
        const std::string inner = name.substr(2, name.size() - 3);
        if (i < layout_.n_nodes) {
            b.set_voltage(inner, x[static_cast<Eigen::Index>(i)]);
        } else {
            b.set_current(inner, x[static_cast<Eigen::Index>(i)]);
        }
    }
    return b;
}

DaeSystem stamp_all(const netlist::FlatCircuit& c, const SystemLayout& layout) { return DaeSystem(c, layout); }

}  // namespace gridflux::mna
