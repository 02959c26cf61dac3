#include <cctype>

#include "gridflux/error.hpp"
#include "gridflux/netlist/expr.hpp"
#include "gridflux/netlist/number.hpp"
#include "text_util.hpp"

namespace gridflux::netlist {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '$'; }

// Recursive descent over the body of a {...} expression.
//   expr  := term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary)*
//   unary := ('-'|'+') unary | primary
//   primary := number | '(' expr ')' | PI | V(name) | I(name) | func(args) | param
class ExprParser {
public:
    ExprParser(std::string_view text, std::size_t line) : s_(text), line_(line) {}

    Expr parse() {
        Expr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected token in expression");
        return e;
    }

private:
    std::string_view s_;
    std::size_t line_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) {
        std::size_t end = pos_;
        while (end < s_.size() && !std::isspace(static_cast<unsigned char>(s_[end])) && end - pos_ < 16) ++end;
        std::string token = pos_ < s_.size() ? std::string(s_.substr(pos_, std::max<std::size_t>(end - pos_, 1)))
                                             : std::string("<end of expression>");
        throw ParseError(line_, token, msg);
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    Expr expr() {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = Expr::binary(ExprKind::Add, lhs, term());
            } else if (accept('-')) {
                lhs = Expr::binary(ExprKind::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    Expr term() {
        Expr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = Expr::binary(ExprKind::Mul, lhs, unary());
            } else if (accept('/')) {
                lhs = Expr::binary(ExprKind::Div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    Expr unary() {
        if (accept('-')) {
            skip_ws();
            // "-2" is a negative literal, not Negate(2); the printer relies on it.
            if (pos_ < s_.size() && scan_spice_number(s_.substr(pos_)) > 0) {
                return Expr::number(-number());
            }
            return Expr::negate(unary());
        }
        if (accept('+')) return unary();
        return primary();
    }

    double number() {
        const std::size_t n = scan_spice_number(s_.substr(pos_));
        auto v = parse_spice_number(s_.substr(pos_, n));
        if (!v) fail("malformed number");
        pos_ += n;
        return *v;
    }

    std::string name_in_parens() {
        expect('(');
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
        if (pos_ == start) fail("expected a name");
        std::string name(s_.substr(start, pos_ - start));
        expect(')');
        return name;
    }

    Expr primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (scan_spice_number(s_.substr(pos_)) > 0) return Expr::number(number());
        if (!ident_start(c)) fail("unexpected character in expression");

        const std::size_t start = pos_;
        while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
        const std::string_view ident = s_.substr(start, pos_ - start);
        skip_ws();
        const bool call = pos_ < s_.size() && s_[pos_] == '(';

        if (call && detail::iequals(ident, "V")) return Expr::voltage(name_in_parens());
        if (call && detail::iequals(ident, "I")) return Expr::current(name_in_parens());
        if (call) {
            auto f = user_function(ident);
            if (!f) {
                pos_ = start;
                fail("unknown function " + std::string(ident));
            }
            expect('(');
            std::vector<Expr> args;
            if (!accept(')')) {
                args.push_back(expr());
                while (accept(',')) args.push_back(expr());
                expect(')');
            }
            if (args.size() != function_arity(*f)) {
                pos_ = start;
                fail(std::string(function_name(*f)) + " takes " + std::to_string(function_arity(*f)) +
                     " argument(s)");
            }
            return Expr::call(*f, std::move(args));
        }
        if (detail::iequals(ident, "PI")) return Expr::pi();
        return Expr::param(std::string(ident));
    }
};

}  // namespace

Expr parse_expr(std::string_view text, std::size_t line) { return ExprParser(text, line).parse(); }

}  // namespace gridflux::netlist
