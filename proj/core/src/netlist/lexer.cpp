#include "lexer.hpp"

#include <cctype>

#include "gridflux/error.hpp"

namespace gridflux::netlist::detail {

namespace {

bool space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

struct Physical {
    std::size_t line;
    std::string_view text;
};

std::vector<Physical> split_lines(std::string_view src) {
    std::vector<Physical> out;
    std::size_t line = 1;
    while (!src.empty()) {
        const auto nl = src.find('\n');
        std::string_view text = src.substr(0, nl);
        if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
        out.push_back({line++, text});
        if (nl == std::string_view::npos) break;
        src.remove_prefix(nl + 1);
    }
    return out;
}

std::string_view trim_left(std::string_view s) {
    while (!s.empty() && space(s.front())) s.remove_prefix(1);
    return s;
}

void tokenize(std::string_view s, std::size_t line, std::vector<Token>& out) {
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (space(c)) {
            ++i;
        } else if (c == '=') {
            out.push_back({TokenKind::Equals, "="});
            ++i;
        } else if (c == ',') {
            out.push_back({TokenKind::Comma, ","});
            ++i;
        } else if (c == '{') {
            int depth = 0;
            std::size_t j = i;
            for (; j < s.size(); ++j) {
                if (s[j] == '{') ++depth;
                if (s[j] == '}' && --depth == 0) break;
            }
            if (j >= s.size()) throw ParseError(line, std::string(s.substr(i, 16)), "unterminated '{' expression");
            out.push_back({TokenKind::Brace, std::string(s.substr(i + 1, j - i - 1))});
            i = j + 1;
        } else if (c == '}') {
            throw ParseError(line, "}", "unbalanced '}'");
        } else {
            std::size_t j = i;
            // Parentheses keep V(a, b)-style output names in one word.
            int paren = 0;
            while (j < s.size()) {
                const char d = s[j];
                if (d == '(') ++paren;
                if (d == ')') --paren;
                if (paren <= 0 && (space(d) || d == '=' || d == ',' || d == '{' || d == '}')) break;
                ++j;
            }
            out.push_back({TokenKind::Word, std::string(s.substr(i, j - i))});
            i = j;
        }
    }
}

}  // namespace

std::vector<LogicalLine> lex(std::string_view source) {
    // Join continuation text first so that braces may span physical lines.
    struct Pending {
        std::size_t line;
        std::string text;
    };
    std::vector<Pending> cards;
    for (const auto& [line, raw] : split_lines(source)) {
        const std::string_view text = trim_left(raw);
        if (text.empty() || text.front() == '*') continue;
        if (text.front() == '+') {
            if (cards.empty()) throw ParseError(line, "+", "continuation line without a preceding card");
            cards.back().text += ' ';
            cards.back().text += text.substr(1);
            continue;
        }
        cards.push_back({line, std::string(text)});
    }
    std::vector<LogicalLine> out;
    out.reserve(cards.size());
    for (auto& c : cards) {
        LogicalLine ll{c.line, {}};
        tokenize(c.text, c.line, ll.tokens);
        if (!ll.tokens.empty()) out.push_back(std::move(ll));
    }
    return out;
}

}  // namespace gridflux::netlist::detail
