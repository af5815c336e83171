#include "doctest.h"

#include "fixtures.h"

#include "nesy/error.h"
#include "nesy/logic/lexer.h"
#include "nesy/logic/parser.h"
#include "nesy/logic/printer.h"
#include "nesy/logic/validate.h"

#include <random>

using namespace nesy;
using namespace nesy::logic;

namespace {

const char* kMnistSum = fixtures::kMnistSum;

ErrorCode codeOf(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::DataError;
}

}  // namespace

TEST_CASE("tokenize covers a rule with a guard") {
    auto toks = tokenize("sum2(C) :- d1(A), d2(B), C == A + B.");
    // sum2 ( C ) :- d1 ( A ) , d2 ( B ) , C == A + B .
    CHECK(toks.size() == 21);
    CHECK(toks.back().kind == TokenKind::Period);
    CHECK(toks[4].kind == TokenKind::Implies);
    CHECK(toks[16].kind == TokenKind::Eq);
    CHECK(toks[18].kind == TokenKind::Plus);
}

TEST_CASE("tokenize empty and comment-only input") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("  // nothing here\n\t").empty());
}

TEST_CASE("tokenize probabilistic fact") {
    auto toks = tokenize("0.5::edge(1,2).");
    // 0.5 :: edge ( 1 , 2 ) .
    REQUIRE(toks.size() == 9);
    CHECK(toks[0].kind == TokenKind::Float);
    CHECK(toks[0].text == "0.5");
    CHECK(toks[1].kind == TokenKind::DoubleColon);
    CHECK(toks[2].kind == TokenKind::Ident);
    CHECK(toks[2].text == "edge");
    CHECK(toks[5].kind == TokenKind::Comma);
    CHECK(toks[6].kind == TokenKind::Int);
    CHECK(toks[7].kind == TokenKind::RParen);
    CHECK(toks[8].kind == TokenKind::Period);
}

TEST_CASE("tokenize positions and errors") {
    auto toks = tokenize("p(1).\n  q(\"a b\").");
    CHECK(toks[5].line == 2);
    CHECK(toks[5].column == 3);
    CHECK(toks[7].kind == TokenKind::String);
    CHECK(toks[7].text == "a b");
    CHECK(toks[7].length == 5);

    try {
        tokenize("p(X) :- q(X) & r(X).");
        FAIL("expected LexError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::LexError);
        CHECK(e.line() == 1);
        CHECK(e.column() == 14);
    }
    CHECK(codeOf([] { tokenize("p(\"open"); }) == ErrorCode::LexError);
    CHECK(codeOf([] { tokenize("p(X) :- q(X), X != 1 ! 2."); }) == ErrorCode::LexError);
}

TEST_CASE("parse the MNIST sum program") {
    Program p = parseSource(kMnistSum);
    CHECK(p.relations.size() == 3);
    CHECK(p.rules.size() == 1);
    CHECK(p.factGroups.size() == 2);
    CHECK(p.queries.size() == 1);
    CHECK(p.factGroups[0].kind == FactGroupKind::CategoricalAD);
    CHECK(p.factGroups[0].members.size() == 10);
    CHECK(p.factGroups[1].members[7].slot.head == "img_b");
    CHECK(p.factGroups[1].members[7].slot.index == 7);
    CHECK(p.rules[0].body.size() == 3);
    CHECK(p.rules[0].body[2].kind == Literal::Kind::Guard);
    CHECK(p.rules[0].pos.line == 12);
    CHECK(p.queries[0].name == "sum2");
}

TEST_CASE("parse errors") {
    try {
        parseSource("q() :- p(X");
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
        CHECK(e.detail() == "RPAREN");
        CHECK(e.line() == 1);
        CHECK(e.column() == 11);
    }
    CHECK(codeOf([] { parseSource("p(x)."); }) == ErrorCode::ParseError);
    CHECK(codeOf([] { parseSource("p(X) :- ."); }) == ErrorCode::ParseError);
    CHECK(codeOf([] { parseSource("rel p(bool)."); }) == ErrorCode::ParseError);
    CHECK(codeOf([] { parseSource("0.5::p(1)"); }) == ErrorCode::ParseError);
}

TEST_CASE("aggregation is rejected as unsupported") {
    CHECK(codeOf([] { parseSource("n(N) :- N = count(X: p(X))."); }) == ErrorCode::UnsupportedFeature);
    CHECK(codeOf([] { parseSource("n(N) :- total(N, X: p(X))."); }) == ErrorCode::UnsupportedFeature);
}

TEST_CASE("duplicate declarations parse but do not validate") {
    Program p = parseSource("rel p(int). rel p(int).");
    CHECK(p.relations.size() == 2);
    CHECK(codeOf([&] { validate(p); }) == ErrorCode::DuplicateRelation);
}

TEST_CASE("validate range restriction and stratification") {
    CHECK(codeOf([] { validate(parseSource("rel p(int). rel q(int). q(X) :- not p(X).")); }) ==
            ErrorCode::RangeRestrictionViolation);
    CHECK(codeOf([] {
        validate(parseSource("rel p(int). rel q(int). p(X) :- q(X). q(X) :- not p(X)."));
    }) == ErrorCode::UnstratifiableNegation);
    CHECK(codeOf([] { validate(parseSource("rel p(int). rel q(int). q(X, Y) :- p(X).")); }) ==
            ErrorCode::ArityMismatch);
    CHECK(codeOf([] { validate(parseSource("rel p(int). q(X) :- p(X).")); }) == ErrorCode::UnknownRelation);
    CHECK(codeOf([] { validate(parseSource("rel p(int). p(\"a\").")); }) == ErrorCode::TypeMismatch);
    CHECK(codeOf([] { validate(parseSource("rel p(int). rel q(int). q(Y) :- p(Y), X < Y.")); }) ==
            ErrorCode::UnboundGuardVariable);
    CHECK(codeOf([] { validate(parseSource("rel p(int). 0.4::p(1); 0.4::p(2).")); }) ==
            ErrorCode::InvalidProbability);
    CHECK(codeOf([] { validate(parseSource("rel p(int). rel q(int). 0.4::p(1); 0.6::q(2).")); }) ==
            ErrorCode::MixedFactGroup);
    CHECK(codeOf([] { validate(parseSource("rel p(int). 0.4::p(X).")); }) == ErrorCode::NonGroundFact);
    CHECK(codeOf([] {
        validate(parseSource("rel p(int). rel c(int). rel q(int). c(1). 0.5::p(1). q(X) :- c(X), not p(X)."));
    }) == ErrorCode::ProbabilisticNegation);
}

TEST_CASE("validate strata") {
    auto vp = validate(parseSource(kMnistSum));
    CHECK(vp.stratumCount == 1);
    for (const auto& [name, s] : vp.strata) {
        CHECK(s == 0);
    }
    CHECK(vp.probabilistic.count("sum2") == 1);

    auto neg = validate(parseSource(R"(
        rel node(int). rel edge(int, int). rel reach(int). rel unreached(int).
        node(1). node(2). node(3). edge(1, 2).
        reach(1).
        reach(Y) :- reach(X), edge(X, Y).
        unreached(X) :- node(X), not reach(X).
    )"));
    CHECK(neg.strata.at("reach") == 0);
    CHECK(neg.strata.at("unreached") == 1);
    CHECK(neg.stratumCount == 2);
}

TEST_CASE("validate is idempotent") {
    auto once = validate(parseSource(kMnistSum));
    auto twice = validate(once.program);
    CHECK(once.program == twice.program);
    CHECK(once.strata == twice.strata);
    CHECK(once.probabilistic == twice.probabilistic);
}

TEST_CASE("pretty-print round trip") {
    const char* programs[] = {
            kMnistSum,
            "rel e(int, int). rel p(int, int). e(1, -2). p(X, Y) :- e(X, Y). p(X, Z) :- p(X, Y), e(Y, Z).",
            "rel a(float, sym). 0.25::a(1.5e-3, \"q\\\"x\"). 1::a(-0.5, \"b\").",
            "rel v(int). rel w(int). w(Z) :- v(X), v(Y), Z == (X - Y) * -3 + -(X), Z != 7, not v(Z).",
            "rel f(). rel g(int). f() :- g(_). query f().",
    };
    for (const char* src : programs) {
        Program a = parseSource(src);
        std::string printed = printProgram(a);
        Program b = parseSource(printed);
        CHECK_MESSAGE(a == b, printed);
        CHECK(printProgram(b) == printed);
    }
}

TEST_CASE("parse error positions stay inside the source") {
    std::string src = kMnistSum;
    std::mt19937 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        std::string cut = src.substr(0, rng() % src.size());
        if (!cut.empty() && trial % 2 == 0) {
            cut[rng() % cut.size()] = "(),.:;"[rng() % 6];
        }
        try {
            parseSource(cut);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ParseError && e.code() != ErrorCode::LexError &&
                    e.code() != ErrorCode::UnsupportedFeature) {
                FAIL("unexpected code");
            }
            int lines = 1;
            std::size_t lastNl = std::string::npos;
            for (std::size_t i = 0; i < cut.size(); ++i) {
                if (cut[i] == '\n') {
                    ++lines;
                    lastNl = i;
                }
            }
            CHECK(e.line() >= 1);
            CHECK(e.line() <= lines);
            CHECK(e.column() >= 1);
            if (e.line() == lines) {
                std::size_t lastLen = cut.size() - (lastNl == std::string::npos ? 0 : lastNl + 1);
                CHECK(static_cast<std::size_t>(e.column()) <= lastLen + 1);
            }
        }
    }
}
