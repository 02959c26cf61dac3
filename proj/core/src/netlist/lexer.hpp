#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gridflux::netlist::detail {

enum class TokenKind { Word, Equals, Comma, Brace };

struct Token {
    TokenKind kind;
    std::string text;  // for Brace: the contents without the braces
};

/// One card after comment removal and '+' continuation joining.
struct LogicalLine {
    std::size_t line;  // 1-based physical line where the card starts
    std::vector<Token> tokens;
};

/// Throws ParseError on an unterminated brace.
std::vector<LogicalLine> lex(std::string_view source);

}  // namespace gridflux::netlist::detail
