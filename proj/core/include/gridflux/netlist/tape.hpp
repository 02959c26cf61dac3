#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gridflux/netlist/expr.hpp"

namespace gridflux::netlist {

/// Postfix program compiled from an Expr with references resolved to slot
/// indices. eval() performs the same floating-point operations in the same
/// order as eval_expr(), so results are bit-identical, and it raises the
/// same DomainError conditions.
class Tape {
public:
    using SlotResolver = std::function<std::size_t(const Reference&)>;

    Tape() = default;
    /// `slot_of` may throw (e.g. UnboundReferenceError) for unknown references.
    static Tape compile(const Expr& e, const SlotResolver& slot_of);

    double eval(std::span<const double> slots) const;

    std::size_t size() const { return ops_.size(); }
    /// Slot indices the program reads, distinct, in first-use order.
    const std::vector<std::size_t>& slots() const { return slots_; }

private:
    enum class Op : std::uint8_t {
        Const, Load, Neg, Add, Sub, Mul, Div,
        Sqrt, Cos, Acos, Sin, Abs, Exp, Sign,
        Limit, InBand, Below, Above,
    };
    struct Instr {
        Op op;
        std::uint32_t index;  // slot for Load, error-text index for checked ops
        double value;         // literal for Const
    };

    void emit(const Expr& e, const SlotResolver& slot_of, std::size_t depth);
    [[noreturn]] void domain_error(const Instr& ins, const std::string& detail) const;

    std::vector<Instr> ops_;
    std::vector<std::string> text_;  // printed subexpressions for error messages
    std::vector<std::size_t> slots_;
    std::size_t max_depth_ = 0;
};

}  // namespace gridflux::netlist
