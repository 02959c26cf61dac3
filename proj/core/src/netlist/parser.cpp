#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "gridflux/error.hpp"
#include "gridflux/netlist/document.hpp"
#include "gridflux/netlist/number.hpp"
#include "lexer.hpp"
#include "text_util.hpp"

namespace gridflux::netlist {

using detail::iequals;
using detail::LogicalLine;
using detail::Token;
using detail::TokenKind;

namespace {

std::optional<DeviceKind> kind_of_letter(char c) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
        case 'V': return DeviceKind::VSource;
        case 'B': return DeviceKind::BSource;
        case 'R': return DeviceKind::Resistor;
        case 'C': return DeviceKind::Capacitor;
        case 'L': return DeviceKind::Inductor;
        case 'X': return DeviceKind::Instance;
        default: return std::nullopt;
    }
}

class CardReader {
public:
    explicit CardReader(const LogicalLine& ll) : ll_(ll) {}

    bool done() const { return pos_ >= ll_.tokens.size(); }
    const Token& peek(std::size_t ahead = 0) const { return ll_.tokens[pos_ + ahead]; }
    bool has(std::size_t ahead) const { return pos_ + ahead < ll_.tokens.size(); }
    const Token& next() {
        if (done()) fail_end("unexpected end of card");
        return ll_.tokens[pos_++];
    }
    std::size_t line() const { return ll_.line; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        throw ParseError(ll_.line, t.kind == TokenKind::Brace ? "{" + t.text + "}" : t.text, msg);
    }
    [[noreturn]] void fail_end(const std::string& msg) const {
        throw ParseError(ll_.line, ll_.tokens.empty() ? "" : ll_.tokens.front().text, msg);
    }

    std::string word(const char* what) {
        if (done()) fail_end(fmt::format("missing {}", what));
        const Token& t = next();
        if (t.kind != TokenKind::Word) fail(t, fmt::format("expected {}", what));
        return t.text;
    }

    Expr value_of(const Token& t) {
        if (t.kind == TokenKind::Word || t.kind == TokenKind::Brace) {
            try {
                return parse_expr(t.text, ll_.line);
            } catch (const ParseError& e) {
                if (t.kind == TokenKind::Word) fail(t, "malformed value");
                throw;
            }
        }
        fail(t, "expected a value");
    }

    Expr value(const char* what) {
        if (done()) fail_end(fmt::format("missing {}", what));
        return value_of(next());
    }

    // name=value pairs until the end of the card. Commas are separators.
    ParamList assignments() {
        ParamList out;
        while (!done()) {
            const Token& t = next();
            if (t.kind == TokenKind::Comma) continue;
            if (t.kind != TokenKind::Word) fail(t, "expected name=value");
            if (done() || peek().kind != TokenKind::Equals) fail(t, "expected '=' after parameter name");
            next();
            if (done()) fail(t, "missing value after '='");
            Expr v = value_of(next());
            for (const auto& [name, _] : out) {
                if (iequals(name, t.text)) fail(t, "duplicate parameter " + t.text);
            }
            out.emplace_back(t.text, std::move(v));
        }
        return out;
    }

private:
    const LogicalLine& ll_;
    std::size_t pos_ = 0;
};

bool is_params_keyword(const Token& t) {
    return t.kind == TokenKind::Word && (iequals(t.text, "PARAMS:") || iequals(t.text, "PARAMS"));
}

DeviceCard parse_card(const LogicalLine& ll) {
    CardReader r(ll);
    DeviceCard card;
    card.line = ll.line;
    const Token& head = r.next();
    if (head.kind != TokenKind::Word) r.fail(head, "expected a device name");
    card.name = head.text;
    const auto kind = kind_of_letter(head.text.front());
    if (!kind) r.fail(head, fmt::format("unknown device letter '{}'", head.text.front()));
    card.kind = *kind;

    switch (card.kind) {
        case DeviceKind::Resistor:
        case DeviceKind::Capacitor:
        case DeviceKind::Inductor:
        case DeviceKind::VSource: {
            card.nodes.push_back(r.word("first node"));
            card.nodes.push_back(r.word("second node"));
            if (card.kind == DeviceKind::VSource && !r.done() && r.peek().kind == TokenKind::Word &&
                iequals(r.peek().text, "DC")) {
                r.next();
            }
            card.value = r.value("value");
            if (!r.done() && (card.kind == DeviceKind::Capacitor || card.kind == DeviceKind::Inductor)) {
                const Token& t = r.next();
                if (!(t.kind == TokenKind::Word && iequals(t.text, "IC")) || r.done() ||
                    r.next().kind != TokenKind::Equals) {
                    r.fail(t, "expected IC=value");
                }
                card.ic = r.value("initial condition");
            }
            if (!r.done()) r.fail(r.peek(), "unexpected token after value");
            break;
        }
        case DeviceKind::BSource: {
            card.nodes.push_back(r.word("first node"));
            card.nodes.push_back(r.word("second node"));
            if (r.done()) r.fail_end("B-source needs I={...} or V={...}");
            const Token& which = r.next();
            if (which.kind != TokenKind::Word || !(iequals(which.text, "I") || iequals(which.text, "V")) ||
                r.done() || r.next().kind != TokenKind::Equals) {
                r.fail(which, "B-source needs I={...} or V={...}");
            }
            card.b_mode = iequals(which.text, "I") ? BMode::Current : BMode::Voltage;
            card.value = r.value("B-source expression");
            if (!r.done()) r.fail(r.peek(), "B-source carries exactly one I= or V= expression");
            break;
        }
        case DeviceKind::Instance: {
            std::vector<std::string> words;
            while (!r.done()) {
                const Token& t = r.peek();
                if (is_params_keyword(t)) {
                    r.next();
                    break;
                }
                if (r.has(1) && r.peek(1).kind == TokenKind::Equals) break;
                words.push_back(r.word("node or subcircuit name"));
            }
            if (words.empty()) r.fail_end("X-instance needs a subcircuit name");
            card.subckt = words.back();
            words.pop_back();
            card.nodes = std::move(words);
            card.params = r.assignments();
            break;
        }
    }
    if (card.kind != DeviceKind::Instance && card.nodes.size() != 2) r.fail_end("wrong number of nodes");
    return card;
}

double closed_number(const Expr& e, std::size_t line, const std::string& what) {
    if (!is_closed(e)) throw ParseError(line, what, "subcircuit default for " + what + " must be numeric");
    try {
        return eval_expr(e, Bindings{});
    } catch (const DomainError& ex) {
        throw ParseError(line, what, ex.what());
    }
}

class Parser {
public:
    NetlistDocument run(std::string_view source) {
        const auto lines = detail::lex(source);
        std::size_t i = 0;
        if (!lines.empty()) {
            const std::string& first = lines[0].tokens.front().text;
            bool card_like = lines[0].tokens.front().kind == TokenKind::Word && first.front() == '.';
            if (!card_like && lines[0].tokens.front().kind == TokenKind::Word && kind_of_letter(first.front())) {
                // SPICE title convention, except when the line is a well-formed card.
                try {
                    parse_card(lines[0]);
                    card_like = true;
                } catch (const ParseError&) {
                }
            }
            if (!card_like) {
                doc_.title = title_text(source, lines[0].line);
                i = 1;
            }
        }
        for (; i < lines.size(); ++i) {
            if (!line(lines[i])) break;
        }
        if (open_) {
            throw ParseError(open_->line, open_->name, "unbalanced .SUBCKT " + open_->name + " (missing .ENDS)");
        }
        return std::move(doc_);
    }

private:
    NetlistDocument doc_;
    std::optional<SubcktDef> open_;

    static std::string title_text(std::string_view source, std::size_t line_no) {
        std::size_t line = 1;
        std::size_t pos = 0;
        while (line < line_no) {
            pos = source.find('\n', pos) + 1;
            ++line;
        }
        auto end = source.find('\n', pos);
        std::string t(source.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
        return t;
    }

    std::vector<DeviceCard>& scope() { return open_ ? open_->body : doc_.devices; }

    void add_device(DeviceCard card, const LogicalLine& ll) {
        for (const auto& d : scope()) {
            if (iequals(d.name, card.name)) {
                throw ParseError(ll.line, card.name, "duplicate device name " + card.name);
            }
        }
        scope().push_back(std::move(card));
    }

    // Returns false at .END.
    bool line(const LogicalLine& ll) {
        const Token& head = ll.tokens.front();
        if (head.kind == TokenKind::Word && head.text.front() == '.') {
            return directive(ll);
        }
        add_device(parse_card(ll), ll);
        return true;
    }

    bool directive(const LogicalLine& ll) {
        CardReader r(ll);
        const Token& head = r.next();
        const std::string kw = detail::to_upper(head.text);
        if (kw == ".END") {
            if (!r.done()) r.fail(r.peek(), "unexpected token after .END");
            return false;
        }
        if (kw == ".SUBCKT") {
            if (open_) r.fail(head, "nested .SUBCKT definitions are not supported");
            SubcktDef def;
            def.line = ll.line;
            def.name = r.word("subcircuit name");
            if (doc_.find_subckt(def.name)) r.fail(head, "duplicate subcircuit " + def.name);
            while (!r.done()) {
                const Token& t = r.peek();
                if (is_params_keyword(t)) {
                    r.next();
                    break;
                }
                if (r.has(1) && r.peek(1).kind == TokenKind::Equals) break;
                std::string port = r.word("port name");
                for (const auto& p : def.ports) {
                    if (iequals(p, port)) r.fail(t, "duplicate port " + port);
                }
                def.ports.push_back(std::move(port));
            }
            for (auto& [name, e] : r.assignments()) {
                def.param_defaults.emplace_back(name, closed_number(e, ll.line, name));
            }
            open_ = std::move(def);
            return true;
        }
        if (kw == ".ENDS") {
            if (!open_) r.fail(head, "unbalanced .ENDS without .SUBCKT");
            if (!r.done()) {
                const Token& t = r.next();
                if (!iequals(t.text, open_->name)) r.fail(t, ".ENDS name does not match .SUBCKT " + open_->name);
            }
            if (!r.done()) r.fail(r.peek(), "unexpected token after .ENDS");
            doc_.subckt_defs.push_back(std::move(*open_));
            open_.reset();
            return true;
        }
        if (open_) r.fail(head, head.text + " is not allowed inside .SUBCKT");

        Directive d;
        d.line = ll.line;
        if (kw == ".PARAM") {
            d.kind = DirectiveKind::Param;
            d.assignments = r.assignments();
            if (d.assignments.empty()) r.fail(head, ".PARAM needs at least one name=value");
        } else if (kw == ".TRAN") {
            d.kind = DirectiveKind::Tran;
            auto num = [&](const char* what) {
                if (r.done()) r.fail(head, fmt::format(".TRAN missing {}", what));
                const Token& t = r.next();
                auto v = t.kind == TokenKind::Word ? parse_spice_number(t.text) : std::nullopt;
                if (!v) r.fail(t, fmt::format("malformed .TRAN {}", what));
                return *v;
            };
            d.tstep = num("step");
            d.tstop = num("stop time");
            if (!r.done()) r.fail(r.peek(), "unexpected token after .TRAN stop time");
        } else if (kw == ".PRINT" || kw == ".OPTIONS" || kw == ".OPTION") {
            d.kind = kw == ".PRINT" ? DirectiveKind::Print : DirectiveKind::Options;
            while (!r.done()) {
                const Token& t = r.next();
                if (t.kind == TokenKind::Comma) continue;
                if (t.kind != TokenKind::Word) r.fail(t, "unexpected token");
                if (!r.done() && r.peek().kind == TokenKind::Equals) {
                    r.next();
                    d.assignments.emplace_back(t.text, r.value("option value"));
                } else {
                    d.words.push_back(t.text);
                }
            }
        } else {
            r.fail(head, "unsupported directive " + head.text);
        }
        doc_.directives.push_back(std::move(d));
        return true;
    }
};

bool params_equal(const ParamList& a, const ParamList& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const auto& x, const auto& y) {
        return iequals(x.first, y.first) && x.second == y.second;
    });
}

bool names_equal(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                      [](const std::string& x, const std::string& y) { return iequals(x, y); });
}

}  // namespace

bool operator==(const DeviceCard& a, const DeviceCard& b) {
    if (a.kind != b.kind || !iequals(a.name, b.name) || !names_equal(a.nodes, b.nodes)) return false;
    if (a.kind == DeviceKind::Instance) return iequals(a.subckt, b.subckt) && params_equal(a.params, b.params);
    if (!(a.value == b.value) || a.ic.has_value() != b.ic.has_value()) return false;
    if (a.ic && !(*a.ic == *b.ic)) return false;
    return a.kind != DeviceKind::BSource || a.b_mode == b.b_mode;
}

bool operator==(const SubcktDef& a, const SubcktDef& b) {
    return iequals(a.name, b.name) && names_equal(a.ports, b.ports) &&
           std::equal(a.param_defaults.begin(), a.param_defaults.end(), b.param_defaults.begin(),
                      b.param_defaults.end(),
                      [](const auto& x, const auto& y) { return iequals(x.first, y.first) && x.second == y.second; }) &&
           a.body == b.body;
}

bool operator==(const Directive& a, const Directive& b) {
    return a.kind == b.kind && params_equal(a.assignments, b.assignments) && a.tstep == b.tstep &&
           a.tstop == b.tstop && names_equal(a.words, b.words);
}

bool operator==(const NetlistDocument& a, const NetlistDocument& b) {
    return a.title == b.title && a.devices == b.devices && a.subckt_defs == b.subckt_defs &&
           a.directives == b.directives;
}

const SubcktDef* NetlistDocument::find_subckt(std::string_view name) const {
    for (const auto& s : subckt_defs) {
        if (iequals(s.name, name)) return &s;
    }
    return nullptr;
}

NetlistDocument parse_netlist(std::string_view source) { return Parser{}.run(source); }

void merge_subckts(NetlistDocument& doc, const NetlistDocument& library) {
    for (const auto& s : library.subckt_defs) {
        if (!doc.find_subckt(s.name)) doc.subckt_defs.push_back(s);
    }
}

}  // namespace gridflux::netlist
