#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nesy::logic {

enum class TokenKind {
    Ident,
    Int,
    Float,
    String,
    LParen,
    RParen,
    Comma,
    Period,
    Implies,      // :-
    DoubleColon,  // ::
    Semicolon,
    Eq,  // ==
    Ne,  // !=
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Assign,  // a lone '=', only produced so aggregation syntax can be rejected precisely
    Colon,   // a lone ':', same reason
};

std::string_view tokenKindName(TokenKind kind);

struct Token {
    TokenKind kind;
    /** Raw lexeme; for String tokens the unescaped contents without quotes. */
    std::string text;
    int line = 1;
    int column = 1;
    std::size_t offset = 0;
    /** Raw lexeme length in source bytes. */
    std::size_t length = 0;
};

/**
 * Splits `.nsl` source into tokens. Whitespace and `//` line comments are
 * dropped. Throws Error(LexError) with the offending position on any
 * character outside the dialect, or on an unterminated string.
 */
std::vector<Token> tokenize(std::string_view source);

}  // namespace nesy::logic
