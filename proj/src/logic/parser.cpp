#include "nesy/logic/parser.h"

#include "nesy/error.h"

#include <cctype>
#include <charconv>
#include <optional>

namespace nesy::logic {

namespace {

bool isVariableName(const std::string& s) {
    return !s.empty() && (std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_');
}

class Parser {
public:
    explicit Parser(std::span<const Token> toks) : toks_(toks) {}

    Program run() {
        Program prog;
        while (!atEnd()) {
            const Token& t = cur();
            if (isIdent("rel") && peekKind(1) == TokenKind::Ident) {
                prog.relations.push_back(decl());
            } else if (isIdent("query") && peekKind(1) == TokenKind::Ident) {
                prog.queries.push_back(query());
            } else if (t.kind == TokenKind::Float || t.kind == TokenKind::Int || startsNeuralSlot()) {
                prog.factGroups.push_back(factLine());
            } else {
                prog.rules.push_back(rule());
            }
        }
        return prog;
    }

private:
    bool atEnd() const {
        return pos_ >= toks_.size();
    }
    const Token& cur() const {
        return toks_[pos_];
    }
    std::optional<TokenKind> peekKind(std::size_t ahead) const {
        if (pos_ + ahead >= toks_.size()) {
            return std::nullopt;
        }
        return toks_[pos_ + ahead].kind;
    }
    bool check(TokenKind k) const {
        return !atEnd() && cur().kind == k;
    }
    bool isIdent(std::string_view text) const {
        return check(TokenKind::Ident) && cur().text == text;
    }
    SourcePos here() const {
        if (!atEnd()) {
            return {cur().line, cur().column};
        }
        if (toks_.empty()) {
            return {1, 1};
        }
        const Token& last = toks_.back();
        return {last.line, last.column + static_cast<int>(last.length)};
    }

    [[noreturn]] void fail(std::string_view expected) const {
        std::string found = atEnd() ? "end of input"
                                    : std::string(tokenKindName(cur().kind)) + " '" + cur().text + "'";
        SourcePos p = here();
        throw Error(ErrorCode::ParseError, "expected " + std::string(expected) + ", found " + found,
                std::string(expected), p.line, p.column);
    }

    [[noreturn]] void unsupported(std::string_view what) const {
        SourcePos p = here();
        throw Error(ErrorCode::UnsupportedFeature, std::string(what) + " is not supported", std::string(what),
                p.line, p.column);
    }

    const Token& expect(TokenKind k) {
        if (!check(k)) {
            fail(tokenKindName(k));
        }
        return toks_[pos_++];
    }

    bool accept(TokenKind k) {
        if (check(k)) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool startsNeuralSlot() const {
        return isIdent("nn") && peekKind(1) == TokenKind::LParen && peekKind(2) == TokenKind::Ident &&
               peekKind(3) == TokenKind::Comma && peekKind(4) == TokenKind::Int &&
               peekKind(5) == TokenKind::RParen && peekKind(6) == TokenKind::DoubleColon;
    }

    RelationDecl decl() {
        RelationDecl d;
        d.pos = here();
        ++pos_;  // rel
        d.name = expect(TokenKind::Ident).text;
        expect(TokenKind::LParen);
        if (!check(TokenKind::RParen)) {
            do {
                d.columnTypes.push_back(type());
            } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RParen);
        expect(TokenKind::Period);
        return d;
    }

    ValueType type() {
        if (isIdent("int")) {
            ++pos_;
            return ValueType::Int;
        }
        if (isIdent("sym")) {
            ++pos_;
            return ValueType::Symbol;
        }
        if (isIdent("float")) {
            ++pos_;
            return ValueType::Float;
        }
        fail("type (int, sym, float)");
    }

    QueryDecl query() {
        QueryDecl q;
        q.pos = here();
        ++pos_;  // query
        q.atom = atom();
        q.name = q.atom.relation;
        expect(TokenKind::Period);
        return q;
    }

    FactGroup factLine() {
        FactGroup g;
        g.pos = here();
        do {
            FactMember m;
            m.slot = prob();
            expect(TokenKind::DoubleColon);
            m.atom = atom();
            g.members.push_back(std::move(m));
        } while (accept(TokenKind::Semicolon));
        expect(TokenKind::Period);
        g.kind = g.members.size() > 1 ? FactGroupKind::CategoricalAD : FactGroupKind::Independent;
        g.relation = g.members.front().atom.relation;
        return g;
    }

    ProbSlot prob() {
        SourcePos p = here();
        if (check(TokenKind::Float) || check(TokenKind::Int)) {
            ProbSlot s = ProbSlot::constantOf(number(cur()).numeric());
            s.pos = p;
            ++pos_;
            return s;
        }
        if (startsNeuralSlot()) {
            pos_ += 2;  // nn (
            std::string head = expect(TokenKind::Ident).text;
            expect(TokenKind::Comma);
            std::size_t index = static_cast<std::size_t>(number(expect(TokenKind::Int)).asInt());
            expect(TokenKind::RParen);
            ProbSlot s = ProbSlot::neural(std::move(head), index);
            s.pos = p;
            return s;
        }
        fail("probability (FLOAT or nn(head, index))");
    }

    Value number(const Token& t, bool negate = false) const {
        const char* b = t.text.data();
        const char* e = b + t.text.size();
        if (t.kind == TokenKind::Int) {
            std::int64_t v = 0;
            auto res = std::from_chars(b, e, v);
            if (res.ec != std::errc{}) {
                throw Error(ErrorCode::ParseError, "integer literal out of range", t.text, t.line, t.column);
            }
            return Value::integer(negate ? -v : v);
        }
        double v = 0;
        auto res = std::from_chars(b, e, v);
        if (res.ec != std::errc{}) {
            throw Error(ErrorCode::ParseError, "bad float literal", t.text, t.line, t.column);
        }
        return Value::real(negate ? -v : v);
    }

    Rule rule() {
        Rule r;
        r.pos = here();
        r.head = atom();
        if (accept(TokenKind::Implies)) {
            do {
                r.body.push_back(literal());
            } while (accept(TokenKind::Comma));
        }
        if (!check(TokenKind::Period)) {
            fail(r.body.empty() ? "IMPLIES or PERIOD" : "COMMA or PERIOD");
        }
        ++pos_;
        return r;
    }

    Atom atom() {
        Atom a;
        a.pos = here();
        a.relation = expect(TokenKind::Ident).text;
        expect(TokenKind::LParen);
        if (!check(TokenKind::RParen)) {
            do {
                a.args.push_back(term());
            } while (accept(TokenKind::Comma));
        }
        if (check(TokenKind::Colon)) {
            unsupported("aggregation");
        }
        expect(TokenKind::RParen);
        return a;
    }

    Term term() {
        SourcePos p = here();
        if (check(TokenKind::Ident)) {
            if (!isVariableName(cur().text)) {
                fail("term (variable, number or quoted symbol)");
            }
            return Term::var(toks_[pos_++].text, p);
        }
        if (check(TokenKind::Int) || check(TokenKind::Float)) {
            return Term::constantOf(number(toks_[pos_++]), p);
        }
        if (check(TokenKind::String)) {
            return Term::constantOf(Value::symbol(toks_[pos_++].text), p);
        }
        if (check(TokenKind::Minus) &&
                (peekKind(1) == TokenKind::Int || peekKind(1) == TokenKind::Float)) {
            ++pos_;
            return Term::constantOf(number(toks_[pos_++], true), p);
        }
        fail("term (variable, number or quoted symbol)");
    }

    Literal literal() {
        Literal lit;
        lit.pos = here();
        if (isIdent("not") && peekKind(1) == TokenKind::Ident) {
            ++pos_;
            lit.kind = Literal::Kind::Negative;
            lit.atom = atom();
            return lit;
        }
        if (check(TokenKind::Ident) && peekKind(1) == TokenKind::LParen) {
            lit.kind = Literal::Kind::Positive;
            lit.atom = atom();
            return lit;
        }
        if (check(TokenKind::Ident) && peekKind(1) == TokenKind::Assign) {
            unsupported("aggregation");
        }
        if (check(TokenKind::Ident) && !isVariableName(cur().text)) {
            fail("atom or comparison");
        }
        lit.kind = Literal::Kind::Guard;
        lit.guard.lhs = expr();
        lit.guard.op = cmpOp();
        lit.guard.rhs = expr();
        return lit;
    }

    CmpOp cmpOp() {
        if (check(TokenKind::Assign)) {
            unsupported("aggregation");
        }
        static constexpr std::pair<TokenKind, CmpOp> table[] = {{TokenKind::Eq, CmpOp::Eq},
                {TokenKind::Ne, CmpOp::Ne}, {TokenKind::Lt, CmpOp::Lt}, {TokenKind::Le, CmpOp::Le},
                {TokenKind::Gt, CmpOp::Gt}, {TokenKind::Ge, CmpOp::Ge}};
        for (auto [k, op] : table) {
            if (accept(k)) {
                return op;
            }
        }
        fail("comparison operator");
    }

    static Expr binary(Expr::Kind kind, Expr lhs, Expr rhs, SourcePos p) {
        Expr e;
        e.kind = kind;
        e.pos = p;
        e.operands.push_back(std::move(lhs));
        e.operands.push_back(std::move(rhs));
        return e;
    }

    Expr expr() {
        SourcePos p = here();
        Expr lhs = product();
        while (check(TokenKind::Plus) || check(TokenKind::Minus)) {
            auto kind = cur().kind == TokenKind::Plus ? Expr::Kind::Add : Expr::Kind::Sub;
            ++pos_;
            lhs = binary(kind, std::move(lhs), product(), p);
        }
        return lhs;
    }

    Expr product() {
        SourcePos p = here();
        Expr lhs = unary();
        while (accept(TokenKind::Star)) {
            lhs = binary(Expr::Kind::Mul, std::move(lhs), unary(), p);
        }
        return lhs;
    }

    Expr unary() {
        SourcePos p = here();
        if (check(TokenKind::Minus)) {
            if (peekKind(1) == TokenKind::Int || peekKind(1) == TokenKind::Float) {
                ++pos_;
                Expr e;
                e.kind = Expr::Kind::Constant;
                e.constant = number(toks_[pos_++], true);
                e.pos = p;
                return e;
            }
            ++pos_;
            Expr e;
            e.kind = Expr::Kind::Neg;
            e.pos = p;
            e.operands.push_back(unary());
            return e;
        }
        return primary();
    }

    Expr primary() {
        SourcePos p = here();
        Expr e;
        e.pos = p;
        if (accept(TokenKind::LParen)) {
            e = expr();
            expect(TokenKind::RParen);
            return e;
        }
        if (check(TokenKind::Ident) && isVariableName(cur().text)) {
            e.kind = Expr::Kind::Variable;
            e.variable = toks_[pos_++].text;
            return e;
        }
        if (check(TokenKind::Int) || check(TokenKind::Float)) {
            e.kind = Expr::Kind::Constant;
            e.constant = number(toks_[pos_++]);
            return e;
        }
        if (check(TokenKind::String)) {
            e.kind = Expr::Kind::Constant;
            e.constant = Value::symbol(toks_[pos_++].text);
            return e;
        }
        fail("expression");
    }

    std::span<const Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

Program parseProgram(std::span<const Token> tokens) {
    return Parser(tokens).run();
}

Program parseSource(std::string_view source) {
    auto toks = tokenize(source);
    return parseProgram(toks);
}

}  // namespace nesy::logic
