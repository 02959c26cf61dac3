#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gridflux::netlist {

enum class ExprKind {
    Number,
    Constant,  // PI
    Param,
    NodeVoltage,
    BranchCurrent,
    Negate,
    Add,
    Sub,
    Mul,
    Div,
    Call,
};

// The first seven are reachable from netlist text. The band indicators and
// Sign only appear in derivative trees built by differentiate().
enum class Function {
    Sqrt,
    Cos,
    Acos,
    Sin,
    Abs,
    Exp,
    Limit,
    Sign,
    InBand,     // 1 if lo <= x <= hi
    BelowBand,  // 1 if x < lo
    AboveBand,  // 1 if x > hi
};

std::string_view function_name(Function f);
std::size_t function_arity(Function f);
/// Case-insensitive lookup of a user-callable function.
std::optional<Function> user_function(std::string_view name);

/// A named quantity an expression can depend on.
struct Reference {
    enum class Kind { Voltage, Current, Param };
    Kind kind;
    std::string name;

    /// "V(name)", "I(name)" or the bare parameter name.
    std::string to_string() const;
    /// Lower-cased to_string(); names are case-insensitive.
    std::string key() const;

    friend bool operator==(const Reference& a, const Reference& b);
};

/// Immutable expression tree with shared structure. Copies are cheap.
class Expr {
public:
    struct Node;

    /// The literal 0.
    Expr();

    static Expr number(double value);
    static Expr pi();
    static Expr param(std::string name);
    static Expr voltage(std::string node);
    static Expr current(std::string device);
    static Expr reference(const Reference& ref);
    static Expr negate(Expr operand);
    static Expr binary(ExprKind op, Expr lhs, Expr rhs);
    static Expr call(Function f, std::vector<Expr> args);

    ExprKind kind() const;
    /// Literal value for Number and Constant nodes.
    double value() const;
    /// Name for Param, NodeVoltage and BranchCurrent nodes.
    const std::string& name() const;
    Function function() const;
    /// Operands of unary, binary and call nodes, in order.
    std::span<const Expr> args() const;

    bool is_number() const { return kind() == ExprKind::Number; }
    bool is_reference() const;
    Reference as_reference() const;

    /// Structural equality. Names compare case-insensitively, numbers bitwise.
    friend bool operator==(const Expr& a, const Expr& b);

    /// Netlist syntax, without the surrounding braces. Numbers print with
    /// enough digits to round-trip exactly.
    std::string to_string() const;

    const Node* node() const { return node_.get(); }

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr sqrt(const Expr& a);
Expr cos(const Expr& a);
Expr acos(const Expr& a);
Expr sin(const Expr& a);
Expr abs(const Expr& a);
Expr exp(const Expr& a);
Expr limit(const Expr& x, const Expr& lo, const Expr& hi);

/// Parses the body of a `{...}` expression. `line` is only used for error
/// reporting.
Expr parse_expr(std::string_view text, std::size_t line = 0);

/// Values for the references an expression may contain. Keys are
/// case-insensitive.
class Bindings {
public:
    Bindings& set_voltage(std::string_view node, double v);
    Bindings& set_current(std::string_view device, double i);
    Bindings& set_param(std::string_view name, double v);
    Bindings& set(const Reference& ref, double v);
    std::optional<double> lookup(const Reference& ref) const;

private:
    std::unordered_map<std::string, double> values_;
};

/// Evaluates `e`. limit(x, lo, hi) is min(max(x, lo), hi). Throws
/// UnboundReferenceError for a missing binding and DomainError for division
/// by exact zero, ACOS outside [-1, 1], SQRT of a negative number, or limit
/// bounds with lo > hi.
double eval_expr(const Expr& e, const Bindings& bindings);

/// Symbolic partial derivative with respect to `wrt`.
///
/// limit() differentiates to 1 inside the closed band and 0 outside (the
/// bounds pick up the complementary pieces when they depend on `wrt`).
/// ABS differentiates through Sign. The 1/sqrt singularities of SQRT and
/// ACOS are floored so the derivative is always finite; where the clamp of a
/// surrounding limit() is active the chain rule multiplies them by zero.
Expr differentiate(const Expr& e, const Reference& wrt);

/// Distinct references in first-appearance order (depth first, left to right).
std::vector<Reference> collect_references(const Expr& e);

/// Rewrites every reference for which `replace` returns a value.
Expr substitute(const Expr& e,
                const std::function<std::optional<Expr>(const Reference&)>& replace);

/// True when the tree contains no reference of any kind.
bool is_closed(const Expr& e);

}  // namespace gridflux::netlist
