#include "gridflux/netlist/tape.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "gridflux/error.hpp"

namespace gridflux::netlist {

Tape Tape::compile(const Expr& e, const SlotResolver& slot_of) {
    Tape t;
    t.emit(e, slot_of, 1);
    return t;
}

void Tape::emit(const Expr& e, const SlotResolver& slot_of, std::size_t depth) {
    max_depth_ = std::max(max_depth_, depth);
    auto checked = [&](Op op) {
        text_.push_back(e.to_string());
        ops_.push_back({op, static_cast<std::uint32_t>(text_.size() - 1), 0.0});
    };
    switch (e.kind()) {
        case ExprKind::Number:
        case ExprKind::Constant:
            ops_.push_back({Op::Const, 0, e.value()});
            return;
        case ExprKind::Param:
        case ExprKind::NodeVoltage:
        case ExprKind::BranchCurrent: {
            const std::size_t slot = slot_of(e.as_reference());
            if (std::find(slots_.begin(), slots_.end(), slot) == slots_.end()) slots_.push_back(slot);
            ops_.push_back({Op::Load, static_cast<std::uint32_t>(slot), 0.0});
            return;
        }
        default:
            break;
    }
    const auto args = e.args();
    for (std::size_t i = 0; i < args.size(); ++i) emit(args[i], slot_of, depth + i);
    switch (e.kind()) {
        case ExprKind::Negate: ops_.push_back({Op::Neg, 0, 0.0}); return;
        case ExprKind::Add: ops_.push_back({Op::Add, 0, 0.0}); return;
        case ExprKind::Sub: ops_.push_back({Op::Sub, 0, 0.0}); return;
        case ExprKind::Mul: ops_.push_back({Op::Mul, 0, 0.0}); return;
        case ExprKind::Div: checked(Op::Div); return;
        default: break;
    }
    switch (e.function()) {
        case Function::Sqrt: checked(Op::Sqrt); return;
        case Function::Cos: ops_.push_back({Op::Cos, 0, 0.0}); return;
        case Function::Acos: checked(Op::Acos); return;
        case Function::Sin: ops_.push_back({Op::Sin, 0, 0.0}); return;
        case Function::Abs: ops_.push_back({Op::Abs, 0, 0.0}); return;
        case Function::Exp: ops_.push_back({Op::Exp, 0, 0.0}); return;
        case Function::Sign: ops_.push_back({Op::Sign, 0, 0.0}); return;
        case Function::Limit: checked(Op::Limit); return;
        case Function::InBand: checked(Op::InBand); return;
        case Function::BelowBand: checked(Op::Below); return;
        case Function::AboveBand: checked(Op::Above); return;
    }
}

void Tape::domain_error(const Instr& ins, const std::string& detail) const {
    const std::string& sub = text_[ins.index];
    throw DomainError(fmt::format(fmt::runtime(detail), sub), sub);
}

double Tape::eval(std::span<const double> slots) const {
    std::array<double, 64> small{};
    std::vector<double> big;
    double* st = small.data();
    if (max_depth_ > small.size()) {
        big.resize(max_depth_);
        st = big.data();
    }
    std::size_t sp = 0;
    for (const Instr& ins : ops_) {
        switch (ins.op) {
            case Op::Const: st[sp++] = ins.value; break;
            case Op::Load: st[sp++] = slots[ins.index]; break;
            case Op::Neg: st[sp - 1] = -st[sp - 1]; break;
            case Op::Add: --sp; st[sp - 1] = st[sp - 1] + st[sp]; break;
            case Op::Sub: --sp; st[sp - 1] = st[sp - 1] - st[sp]; break;
            case Op::Mul: --sp; st[sp - 1] = st[sp - 1] * st[sp]; break;
            case Op::Div:
                --sp;
                if (st[sp] == 0.0) domain_error(ins, "division by zero in {}");
                st[sp - 1] = st[sp - 1] / st[sp];
                break;
            case Op::Sqrt:
                if (st[sp - 1] < 0.0) domain_error(ins, "SQRT of negative value in {}");
                st[sp - 1] = std::sqrt(st[sp - 1]);
                break;
            case Op::Cos: st[sp - 1] = std::cos(st[sp - 1]); break;
            case Op::Sin: st[sp - 1] = std::sin(st[sp - 1]); break;
            case Op::Exp: st[sp - 1] = std::exp(st[sp - 1]); break;
            case Op::Abs: st[sp - 1] = std::fabs(st[sp - 1]); break;
            case Op::Acos: {
                const double u = st[sp - 1];
                if (!(u >= -1.0 && u <= 1.0)) {
                    domain_error(ins, fmt::format("ACOS argument {} outside [-1, 1] in {{}}", u));
                }
                st[sp - 1] = std::acos(u);
                break;
            }
            case Op::Sign: {
                const double u = st[sp - 1];
                st[sp - 1] = u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
                break;
            }
            case Op::Limit:
            case Op::InBand:
            case Op::Below:
            case Op::Above: {
                sp -= 2;
                const double x = st[sp - 1];
                const double lo = st[sp];
                const double hi = st[sp + 1];
                if (lo > hi) {
                    domain_error(ins, fmt::format("limit bounds inverted ({} > {}) in {{}}", lo, hi));
                }
                double r;
                switch (ins.op) {
                    case Op::Limit: r = std::min(std::max(x, lo), hi); break;
                    case Op::InBand: r = (x >= lo && x <= hi) ? 1.0 : 0.0; break;
                    case Op::Below: r = x < lo ? 1.0 : 0.0; break;
                    default: r = x > hi ? 1.0 : 0.0; break;
                }
                st[sp - 1] = r;
                break;
            }
        }
    }
    return st[0];
}

}  // namespace gridflux::netlist
