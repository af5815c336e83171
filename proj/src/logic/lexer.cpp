#include "nesy/logic/lexer.h"

#include "nesy/error.h"

#include <cctype>

namespace nesy::logic {

std::string_view tokenKindName(TokenKind kind) {
    switch (kind) {
        case TokenKind::Ident: return "IDENT";
        case TokenKind::Int: return "INT";
        case TokenKind::Float: return "FLOAT";
        case TokenKind::String: return "STRING";
        case TokenKind::LParen: return "LPAREN";
        case TokenKind::RParen: return "RPAREN";
        case TokenKind::Comma: return "COMMA";
        case TokenKind::Period: return "PERIOD";
        case TokenKind::Implies: return "IMPLIES";
        case TokenKind::DoubleColon: return "DOUBLECOLON";
        case TokenKind::Semicolon: return "SEMICOLON";
        case TokenKind::Eq: return "EQ";
        case TokenKind::Ne: return "NE";
        case TokenKind::Lt: return "LT";
        case TokenKind::Le: return "LE";
        case TokenKind::Gt: return "GT";
        case TokenKind::Ge: return "GE";
        case TokenKind::Plus: return "PLUS";
        case TokenKind::Minus: return "MINUS";
        case TokenKind::Star: return "STAR";
        case TokenKind::Assign: return "ASSIGN";
        case TokenKind::Colon: return "COLON";
    }
    return "?";
}

namespace {

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skipTrivia();
            if (pos_ >= src_.size()) {
                break;
            }
            out.push_back(next());
        }
        return out;
    }

private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skipTrivia() {
        while (pos_ < src_.size()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') {
                    advance();
                }
            } else {
                break;
            }
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::LexError, what, std::string(1, peek()), line_, col_);
    }

    Token make(TokenKind kind, std::size_t start, int line, int col) const {
        return Token{kind, std::string(src_.substr(start, pos_ - start)), line, col, start, pos_ - start};
    }

    Token next() {
        const std::size_t start = pos_;
        const int line = line_;
        const int col = col_;
        const char c = peek();

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
                advance();
            }
            return make(TokenKind::Ident, start, line, col);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            return number(start, line, col);
        }
        if (c == '"') {
            return string(start, line, col);
        }

        auto single = [&](TokenKind kind) {
            advance();
            return make(kind, start, line, col);
        };
        auto dbl = [&](TokenKind kind) {
            advance();
            advance();
            return make(kind, start, line, col);
        };

        switch (c) {
            case '(': return single(TokenKind::LParen);
            case ')': return single(TokenKind::RParen);
            case ',': return single(TokenKind::Comma);
            case '.': return single(TokenKind::Period);
            case ';': return single(TokenKind::Semicolon);
            case '+': return single(TokenKind::Plus);
            case '-': return single(TokenKind::Minus);
            case '*': return single(TokenKind::Star);
            case ':':
                if (peek(1) == '-') return dbl(TokenKind::Implies);
                if (peek(1) == ':') return dbl(TokenKind::DoubleColon);
                return single(TokenKind::Colon);
            case '=':
                if (peek(1) == '=') return dbl(TokenKind::Eq);
                return single(TokenKind::Assign);
            case '!':
                if (peek(1) == '=') return dbl(TokenKind::Ne);
                break;
            case '<':
                if (peek(1) == '=') return dbl(TokenKind::Le);
                return single(TokenKind::Lt);
            case '>':
                if (peek(1) == '=') return dbl(TokenKind::Ge);
                return single(TokenKind::Gt);
            default: break;
        }
        fail("illegal character");
    }

    Token number(std::size_t start, int line, int col) {
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
            advance();
        }
        bool isFloat = false;
        // "2." followed by a non-digit is INT then PERIOD: facts end with '.'.
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
            isFloat = true;
            advance();
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                advance();
            }
        }
        if (isFloat && (peek() == 'e' || peek() == 'E')) {
            std::size_t k = 1;
            if (peek(k) == '+' || peek(k) == '-') {
                ++k;
            }
            if (std::isdigit(static_cast<unsigned char>(peek(k)))) {
                for (std::size_t i = 0; i < k; ++i) {
                    advance();
                }
                while (std::isdigit(static_cast<unsigned char>(peek()))) {
                    advance();
                }
            }
        }
        return make(isFloat ? TokenKind::Float : TokenKind::Int, start, line, col);
    }

    Token string(std::size_t start, int line, int col) {
        advance();  // opening quote
        std::string text;
        while (true) {
            if (pos_ >= src_.size() || peek() == '\n') {
                throw Error(ErrorCode::LexError, "unterminated string literal", "\"", line, col);
            }
            char c = peek();
            if (c == '"') {
                advance();
                break;
            }
            if (c == '\\') {
                advance();
                char e = peek();
                switch (e) {
                    case 'n': text += '\n'; break;
                    case 't': text += '\t'; break;
                    case '"': text += '"'; break;
                    case '\\': text += '\\'; break;
                    default: fail("unknown escape sequence");
                }
                advance();
                continue;
            }
            // Any other byte, including UTF-8 continuation bytes, is payload.
            text += c;
            advance();
        }
        return Token{TokenKind::String, std::move(text), line, col, start, pos_ - start};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
    return Lexer(source).run();
}

}  // namespace nesy::logic
