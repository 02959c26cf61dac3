#include "gridflux/netlist/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <bit>
#include <cstdint>

#include <fmt/format.h>

#include "gridflux/error.hpp"
#include "text_util.hpp"

namespace gridflux::netlist {

struct Expr::Node {
    ExprKind kind = ExprKind::Number;
    double value = 0.0;
    std::string name;
    Function function = Function::Sqrt;
    std::vector<Expr> args;
};

namespace {

constexpr double kSqrtFloor = 1e-30;
constexpr double kAcosFloor = 1e-16;
constexpr double kHuge = 1e300;

struct FunctionInfo {
    Function f;
    std::string_view name;
    std::size_t arity;
    bool user;
};

constexpr FunctionInfo kFunctions[] = {
    {Function::Sqrt, "SQRT", 1, true},          {Function::Cos, "COS", 1, true},
    {Function::Acos, "ACOS", 1, true},          {Function::Sin, "SIN", 1, true},
    {Function::Abs, "ABS", 1, true},            {Function::Exp, "EXP", 1, true},
    {Function::Limit, "limit", 3, true},        {Function::Sign, "__sign", 1, false},
    {Function::InBand, "__inband", 3, false},   {Function::BelowBand, "__below", 3, false},
    {Function::AboveBand, "__above", 3, false},
};

const FunctionInfo& info(Function f) {
    for (const auto& fi : kFunctions) {
        if (fi.f == f) return fi;
    }
    throw std::logic_error("unknown function");
}

int precedence(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Add:
        case ExprKind::Sub:
            return 1;
        case ExprKind::Mul:
        case ExprKind::Div:
            return 2;
        case ExprKind::Negate:
            return 3;
        case ExprKind::Number:
            return e.value() < 0 || std::signbit(e.value()) ? 3 : 4;
        default:
            return 4;
    }
}

void print(const Expr& e, std::string& out);

void print_child(const Expr& child, int min_prec, std::string& out) {
    if (precedence(child) < min_prec) {
        out += '(';
        print(child, out);
        out += ')';
    } else {
        print(child, out);
    }
}

void print(const Expr& e, std::string& out) {
    switch (e.kind()) {
        case ExprKind::Number:
            out += fmt::format("{}", e.value());
            return;
        case ExprKind::Constant:
            out += "PI";
            return;
        case ExprKind::Param:
            out += e.name();
            return;
        case ExprKind::NodeVoltage:
            out += "V(" + e.name() + ")";
            return;
        case ExprKind::BranchCurrent:
            out += "I(" + e.name() + ")";
            return;
        case ExprKind::Negate: {
            out += '-';
            const Expr& a = e.args()[0];
            // A bare literal after '-' would re-parse as a negative literal.
            if (a.is_number() || precedence(a) < 3) {
                out += '(';
                print(a, out);
                out += ')';
            } else {
                print(a, out);
            }
            return;
        }
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
        case ExprKind::Div: {
            const int p = precedence(e);
            print_child(e.args()[0], p, out);
            switch (e.kind()) {
                case ExprKind::Add: out += '+'; break;
                case ExprKind::Sub: out += '-'; break;
                case ExprKind::Mul: out += '*'; break;
                default: out += '/'; break;
            }
            // Strictly higher on the right keeps the tree shape on re-parse.
            print_child(e.args()[1], p + 1, out);
            return;
        }
        case ExprKind::Call: {
            out += function_name(e.function());
            out += '(';
            bool first = true;
            for (const auto& a : e.args()) {
                if (!first) out += ", ";
                first = false;
                print(a, out);
            }
            out += ')';
            return;
        }
    }
}

double eval(const Expr& e, const Bindings& b) {
    switch (e.kind()) {
        case ExprKind::Number:
        case ExprKind::Constant:
            return e.value();
        case ExprKind::Param:
        case ExprKind::NodeVoltage:
        case ExprKind::BranchCurrent: {
            const auto ref = e.as_reference();
            if (auto v = b.lookup(ref)) return *v;
            throw UnboundReferenceError(ref.to_string());
        }
        case ExprKind::Negate:
            return -eval(e.args()[0], b);
        case ExprKind::Add:
            return eval(e.args()[0], b) + eval(e.args()[1], b);
        case ExprKind::Sub:
            return eval(e.args()[0], b) - eval(e.args()[1], b);
        case ExprKind::Mul:
            return eval(e.args()[0], b) * eval(e.args()[1], b);
        case ExprKind::Div: {
            const double num = eval(e.args()[0], b);
            const double den = eval(e.args()[1], b);
            if (den == 0.0) throw DomainError("division by zero in " + e.to_string(), e.to_string());
            return num / den;
        }
        case ExprKind::Call:
            break;
    }
    const auto args = e.args();
    switch (e.function()) {
        case Function::Sqrt: {
            const double u = eval(args[0], b);
            if (u < 0.0) throw DomainError("SQRT of negative value in " + e.to_string(), e.to_string());
            return std::sqrt(u);
        }
        case Function::Cos:
            return std::cos(eval(args[0], b));
        case Function::Sin:
            return std::sin(eval(args[0], b));
        case Function::Exp:
            return std::exp(eval(args[0], b));
        case Function::Abs:
            return std::fabs(eval(args[0], b));
        case Function::Acos: {
            const double u = eval(args[0], b);
            if (!(u >= -1.0 && u <= 1.0)) {
                throw DomainError(fmt::format("ACOS argument {} outside [-1, 1] in {}", u, e.to_string()),
                                  e.to_string());
            }
            return std::acos(u);
        }
        case Function::Sign: {
            const double u = eval(args[0], b);
            return u > 0.0 ? 1.0 : (u < 0.0 ? -1.0 : 0.0);
        }
        case Function::Limit:
        case Function::InBand:
        case Function::BelowBand:
        case Function::AboveBand: {
            const double x = eval(args[0], b);
            const double lo = eval(args[1], b);
            const double hi = eval(args[2], b);
            if (lo > hi) {
                throw DomainError(fmt::format("limit bounds inverted ({} > {}) in {}", lo, hi, e.to_string()),
                                  e.to_string());
            }
            switch (e.function()) {
                case Function::Limit: return std::min(std::max(x, lo), hi);
                case Function::InBand: return (x >= lo && x <= hi) ? 1.0 : 0.0;
                case Function::BelowBand: return x < lo ? 1.0 : 0.0;
                default: return x > hi ? 1.0 : 0.0;
            }
        }
    }
    throw std::logic_error("unreachable");
}

// Simplifying constructors used by differentiate().
Expr s_add(const Expr& a, const Expr& b) {
    if (a.is_number() && a.value() == 0.0) return b;
    if (b.is_number() && b.value() == 0.0) return a;
    if (a.is_number() && b.is_number()) return Expr::number(a.value() + b.value());
    return Expr::binary(ExprKind::Add, a, b);
}

Expr s_neg(const Expr& a) {
    if (a.is_number()) return Expr::number(-a.value());
    if (a.kind() == ExprKind::Negate) return a.args()[0];
    return Expr::negate(a);
}

Expr s_sub(const Expr& a, const Expr& b) {
    if (b.is_number() && b.value() == 0.0) return a;
    if (a.is_number() && a.value() == 0.0) return s_neg(b);
    if (a.is_number() && b.is_number()) return Expr::number(a.value() - b.value());
    return Expr::binary(ExprKind::Sub, a, b);
}

Expr s_mul(const Expr& a, const Expr& b) {
    if ((a.is_number() && a.value() == 0.0) || (b.is_number() && b.value() == 0.0)) return Expr::number(0.0);
    if (a.is_number() && a.value() == 1.0) return b;
    if (b.is_number() && b.value() == 1.0) return a;
    if (a.is_number() && b.is_number()) return Expr::number(a.value() * b.value());
    return Expr::binary(ExprKind::Mul, a, b);
}

Expr s_div(const Expr& a, const Expr& b) {
    if (a.is_number() && a.value() == 0.0) return Expr::number(0.0);
    if (b.is_number() && b.value() == 1.0) return a;
    return Expr::binary(ExprKind::Div, a, b);
}

bool is_zero(const Expr& e) { return e.is_number() && e.value() == 0.0; }

Expr diff(const Expr& e, const Reference& wrt) {
    switch (e.kind()) {
        case ExprKind::Number:
        case ExprKind::Constant:
            return Expr::number(0.0);
        case ExprKind::Param:
        case ExprKind::NodeVoltage:
        case ExprKind::BranchCurrent:
            return Expr::number(e.as_reference() == wrt ? 1.0 : 0.0);
        case ExprKind::Negate:
            return s_neg(diff(e.args()[0], wrt));
        case ExprKind::Add:
            return s_add(diff(e.args()[0], wrt), diff(e.args()[1], wrt));
        case ExprKind::Sub:
            return s_sub(diff(e.args()[0], wrt), diff(e.args()[1], wrt));
        case ExprKind::Mul: {
            const Expr& a = e.args()[0];
            const Expr& b = e.args()[1];
            return s_add(s_mul(diff(a, wrt), b), s_mul(a, diff(b, wrt)));
        }
        case ExprKind::Div: {
            const Expr& a = e.args()[0];
            const Expr& b = e.args()[1];
            const Expr da = diff(a, wrt);
            const Expr db = diff(b, wrt);
            return s_sub(s_div(da, b), s_div(s_mul(a, db), s_mul(b, b)));
        }
        case ExprKind::Call:
            break;
    }
    const auto args = e.args();
    const Expr du = diff(args[0], wrt);
    switch (e.function()) {
        case Function::Sqrt: {
            if (is_zero(du)) return du;
            const Expr floored = limit(args[0], Expr::number(kSqrtFloor), Expr::number(kHuge));
            return s_div(du, s_mul(Expr::number(2.0), sqrt(floored)));
        }
        case Function::Cos:
            return is_zero(du) ? du : s_mul(s_neg(sin(args[0])), du);
        case Function::Sin:
            return is_zero(du) ? du : s_mul(cos(args[0]), du);
        case Function::Exp:
            return is_zero(du) ? du : s_mul(exp(args[0]), du);
        case Function::Abs:
            return is_zero(du) ? du : s_mul(Expr::call(Function::Sign, {args[0]}), du);
        case Function::Acos: {
            if (is_zero(du)) return du;
            const Expr one_minus = Expr::number(1.0) - args[0] * args[0];
            const Expr floored = limit(one_minus, Expr::number(kAcosFloor), Expr::number(kHuge));
            return s_neg(s_div(du, sqrt(floored)));
        }
        case Function::Limit: {
            const Expr dlo = diff(args[1], wrt);
            const Expr dhi = diff(args[2], wrt);
            std::vector<Expr> band{args[0], args[1], args[2]};
            Expr out = s_mul(Expr::call(Function::InBand, band), du);
            out = s_add(out, s_mul(Expr::call(Function::BelowBand, band), dlo));
            out = s_add(out, s_mul(Expr::call(Function::AboveBand, band), dhi));
            return out;
        }
        case Function::Sign:
        case Function::InBand:
        case Function::BelowBand:
        case Function::AboveBand:
            return Expr::number(0.0);
    }
    throw std::logic_error("unreachable");
}

void collect(const Expr& e, std::vector<Reference>& out) {
    if (e.is_reference()) {
        auto ref = e.as_reference();
        if (std::find(out.begin(), out.end(), ref) == out.end()) out.push_back(std::move(ref));
        return;
    }
    for (const auto& a : e.args()) collect(a, out);
}

}  // namespace

std::string_view function_name(Function f) { return info(f).name; }
std::size_t function_arity(Function f) { return info(f).arity; }

std::optional<Function> user_function(std::string_view name) {
    for (const auto& fi : kFunctions) {
        if (fi.user && detail::iequals(fi.name, name)) return fi.f;
    }
    return std::nullopt;
}

std::string Reference::to_string() const {
    switch (kind) {
        case Kind::Voltage: return "V(" + name + ")";
        case Kind::Current: return "I(" + name + ")";
        case Kind::Param: return name;
    }
    return name;
}

std::string Reference::key() const { return detail::to_lower(to_string()); }

bool operator==(const Reference& a, const Reference& b) {
    return a.kind == b.kind && detail::iequals(a.name, b.name);
}

Expr::Expr() : node_(std::make_shared<const Node>()) {}

Expr Expr::number(double value) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Number;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::pi() {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Constant;
    n->value = std::numbers::pi;
    n->name = "PI";
    return Expr(std::move(n));
}

namespace {
std::shared_ptr<Expr::Node> named(ExprKind kind, std::string name) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = kind;
    n->name = std::move(name);
    return n;
}
}  // namespace

Expr Expr::param(std::string name) { return Expr(named(ExprKind::Param, std::move(name))); }
Expr Expr::voltage(std::string node) { return Expr(named(ExprKind::NodeVoltage, std::move(node))); }
Expr Expr::current(std::string device) { return Expr(named(ExprKind::BranchCurrent, std::move(device))); }

Expr Expr::reference(const Reference& ref) {
    switch (ref.kind) {
        case Reference::Kind::Voltage: return voltage(ref.name);
        case Reference::Kind::Current: return current(ref.name);
        case Reference::Kind::Param: return param(ref.name);
    }
    return param(ref.name);
}

Expr Expr::negate(Expr operand) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Negate;
    n->args.push_back(std::move(operand));
    return Expr(std::move(n));
}

Expr Expr::binary(ExprKind op, Expr lhs, Expr rhs) {
    if (op != ExprKind::Add && op != ExprKind::Sub && op != ExprKind::Mul && op != ExprKind::Div) {
        throw std::invalid_argument("Expr::binary needs an arithmetic operator");
    }
    auto n = std::make_shared<Node>();
    n->kind = op;
    n->args.push_back(std::move(lhs));
    n->args.push_back(std::move(rhs));
    return Expr(std::move(n));
}

Expr Expr::call(Function f, std::vector<Expr> args) {
    if (args.size() != function_arity(f)) {
        throw std::invalid_argument(fmt::format("{} takes {} argument(s), got {}", function_name(f),
                                                function_arity(f), args.size()));
    }
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Call;
    n->function = f;
    n->args = std::move(args);
    return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Function Expr::function() const { return node_->function; }
std::span<const Expr> Expr::args() const { return node_->args; }

bool Expr::is_reference() const {
    const auto k = kind();
    return k == ExprKind::Param || k == ExprKind::NodeVoltage || k == ExprKind::BranchCurrent;
}

Reference Expr::as_reference() const {
    switch (kind()) {
        case ExprKind::NodeVoltage: return {Reference::Kind::Voltage, name()};
        case ExprKind::BranchCurrent: return {Reference::Kind::Current, name()};
        case ExprKind::Param: return {Reference::Kind::Param, name()};
        default: throw std::logic_error("expression is not a reference");
    }
}

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case ExprKind::Number:
            return std::bit_cast<std::uint64_t>(a.value()) == std::bit_cast<std::uint64_t>(b.value());
        case ExprKind::Constant:
            return true;
        case ExprKind::Param:
        case ExprKind::NodeVoltage:
        case ExprKind::BranchCurrent:
            return detail::iequals(a.name(), b.name());
        case ExprKind::Call:
            if (a.function() != b.function()) return false;
            break;
        default:
            break;
    }
    const auto aa = a.args();
    const auto ba = b.args();
    return std::equal(aa.begin(), aa.end(), ba.begin(), ba.end());
}

std::string Expr::to_string() const {
    std::string out;
    print(*this, out);
    return out;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(ExprKind::Div, a, b); }
Expr operator-(const Expr& a) { return Expr::negate(a); }
Expr sqrt(const Expr& a) { return Expr::call(Function::Sqrt, {a}); }
Expr cos(const Expr& a) { return Expr::call(Function::Cos, {a}); }
Expr acos(const Expr& a) { return Expr::call(Function::Acos, {a}); }
Expr sin(const Expr& a) { return Expr::call(Function::Sin, {a}); }
Expr abs(const Expr& a) { return Expr::call(Function::Abs, {a}); }
Expr exp(const Expr& a) { return Expr::call(Function::Exp, {a}); }
Expr limit(const Expr& x, const Expr& lo, const Expr& hi) { return Expr::call(Function::Limit, {x, lo, hi}); }

Bindings& Bindings::set_voltage(std::string_view node, double v) {
    return set({Reference::Kind::Voltage, std::string(node)}, v);
}
Bindings& Bindings::set_current(std::string_view device, double i) {
    return set({Reference::Kind::Current, std::string(device)}, i);
}
Bindings& Bindings::set_param(std::string_view name, double v) {
    return set({Reference::Kind::Param, std::string(name)}, v);
}
Bindings& Bindings::set(const Reference& ref, double v) {
    values_[ref.key()] = v;
    return *this;
}
std::optional<double> Bindings::lookup(const Reference& ref) const {
    auto it = values_.find(ref.key());
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

double eval_expr(const Expr& e, const Bindings& bindings) { return eval(e, bindings); }

Expr differentiate(const Expr& e, const Reference& wrt) { return diff(e, wrt); }

std::vector<Reference> collect_references(const Expr& e) {
    std::vector<Reference> out;
    collect(e, out);
    return out;
}

Expr substitute(const Expr& e, const std::function<std::optional<Expr>(const Reference&)>& replace) {
    if (e.is_reference()) {
        if (auto r = replace(e.as_reference())) return *r;
        return e;
    }
    const auto args = e.args();
    if (args.empty()) return e;
    std::vector<Expr> out;
    out.reserve(args.size());
    bool changed = false;
    for (const auto& a : args) {
        out.push_back(substitute(a, replace));
        changed = changed || out.back().node() != a.node();
    }
    if (!changed) return e;
    switch (e.kind()) {
        case ExprKind::Negate: return Expr::negate(std::move(out[0]));
        case ExprKind::Call: return Expr::call(e.function(), std::move(out));
        default: return Expr::binary(e.kind(), std::move(out[0]), std::move(out[1]));
    }
}

bool is_closed(const Expr& e) {
    if (e.is_reference()) return false;
    for (const auto& a : e.args()) {
        if (!is_closed(a)) return false;
    }
    return true;
}

}  // namespace gridflux::netlist
