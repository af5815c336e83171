#include "doctest.h"

#include "fixtures.h"

#include "nesy/error.h"
#include "nesy/logic/parser.h"
#include "nesy/reasoner/eval.h"

#include <numeric>

using namespace nesy;
using namespace nesy::reasoner;
using provenance::kUnboundedK;

namespace {

std::shared_ptr<const CompiledProgram> load(const char* src) {
    return compile(logic::validate(logic::parseSource(src)));
}

NeuralOutputs uniformDigits() {
    return {{"img_a", std::vector<double>(10, 0.1)}, {"img_b", std::vector<double>(10, 0.1)}};
}

std::vector<double> oneHot(std::size_t at) {
    std::vector<double> v(10, 0.0);
    v[at] = 1.0;
    return v;
}

ErrorCode codeOf(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::DataError;
}

const char* kPath = R"(
rel edge(int, int). rel path(int, int).
edge(1, 2). edge(2, 3). edge(3, 4).
path(X, Y) :- edge(X, Y).
path(X, Z) :- path(X, Y), edge(Y, Z).
query path(A, B).
)";

}  // namespace

TEST_CASE("transitive closure of a path graph") {
    auto ctx = run(load(kPath), SemiringSpec::boolean());
    auto rows = query(ctx, "path");
    CHECK(rows.size() == 6);
    CHECK(ctx.stats().iterations <= 4);
    for (const auto& r : rows) {
        CHECK(r.probability == 1.0);
    }
    CHECK(rows.front().tuple == Tuple{Value::integer(1), Value::integer(2)});
    CHECK(rows.back().tuple == Tuple{Value::integer(3), Value::integer(4)});
}

TEST_CASE("MNIST sum under uniform digits") {
    auto cp = load(fixtures::kMnistSum);
    for (auto spec : {SemiringSpec::topKGrad(kUnboundedK), SemiringSpec::topK(kUnboundedK)}) {
        auto ctx = run(cp, spec, uniformDigits());
        CHECK(ctx.relation("sum2").tuples.size() == 19);
        auto rows = query(ctx, "sum2");
        REQUIRE(rows.size() == 19);
        double total = 0;
        for (const auto& r : rows) {
            total += r.probability;
            CHECK(r.probability >= 0.0);
            CHECK(r.probability <= 1.0);
        }
        CHECK(std::abs(total - 1.0) < 1e-9);
        CHECK(rows[9].tuple[0] == Value::integer(9));
        CHECK(std::abs(rows[9].probability - 0.1) < 1e-12);
        CHECK(std::abs(rows[0].probability - 0.01) < 1e-12);
    }
}

TEST_CASE("MNIST sum with one-hot digits") {
    auto ctx = run(load(fixtures::kMnistSum), SemiringSpec::topK(kUnboundedK),
            {{"img_a", oneHot(3)}, {"img_b", oneHot(5)}});
    auto rows = query(ctx, "sum2");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].tuple == Tuple{Value::integer(8)});
    CHECK(rows[0].probability == 1.0);

    auto scalar = run(load(fixtures::kMnistSum), SemiringSpec::addMult(), {{"img_a", oneHot(3)}, {"img_b", oneHot(5)}});
    auto srows = query(scalar, "sum2");
    REQUIRE(srows.size() == 1);
    CHECK(srows[0].probability == 1.0);
}

TEST_CASE("gradients flow to the digit heads") {
    auto cp = load(fixtures::kMnistSum);
    auto outputs = uniformDigits();
    auto ctx = run(cp, SemiringSpec::topKGrad(kUnboundedK), outputs);
    auto rows = query(ctx, "sum2");
    REQUIRE(rows[9].grad);
    NeuralOutputs grads;
    accumulateHeadGradients(ctx, *rows[9].grad, 1.0, outputs, grads);
    // P(sum = 9) = sum_a p_a(a) p_b(9 - a), so each partial is 0.1.
    for (double g : grads.at("img_a")) {
        CHECK(g == doctest::Approx(0.1));
    }
    CHECK(grads.at("img_b").size() == 10);
}

TEST_CASE("seeding errors and renormalization") {
    auto cp = load(fixtures::kMnistSum);
    CHECK(codeOf([&] { run(cp, SemiringSpec::addMult(), {{"img_a", oneHot(1)}}); }) == ErrorCode::MissingHead);
    CHECK(codeOf([&] {
        run(cp, SemiringSpec::addMult(), {{"img_a", oneHot(1)}, {"img_b", std::vector<double>(9, 0.1)}});
    }) == ErrorCode::IndexOutOfRange);
    auto negative = oneHot(2);
    negative[3] = -0.1;
    CHECK(codeOf([&] { run(cp, SemiringSpec::addMult(), {{"img_a", negative}, {"img_b", oneHot(1)}}); }) ==
            ErrorCode::NegativeProbability);

    auto low = std::vector<double>(10, 0.098);
    auto ctx = run(cp, SemiringSpec::addMult(), {{"img_a", low}, {"img_b", oneHot(0)}});
    double total = 0;
    for (double p : ctx.weights().groups[0].probs) {
        total += p;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(ctx.relation("digit1").tuples.size() == 10);
    CHECK(std::get<double>(ctx.relation("digit1").tuples.begin()->second) == doctest::Approx(0.1));
}

TEST_CASE("boolean seeding keeps facts above one half") {
    auto ctx = run(load(fixtures::kMnistSum), SemiringSpec::boolean(), {{"img_a", oneHot(3)}, {"img_b", oneHot(5)}});
    CHECK(ctx.relation("digit1").tuples.size() == 1);
    auto rows = query(ctx, "sum2");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].tuple[0] == Value::integer(8));
}

TEST_CASE("program without rules") {
    auto ctx = run(load("rel p(int). p(1). 0.5::p(2). query p(X)."), SemiringSpec::maxMin());
    CHECK(ctx.stats().iterations == 1);
    auto rows = query(ctx, "p");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].probability == 1.0);
    CHECK(rows[1].probability == 0.5);
}

TEST_CASE("query over an empty relation and unknown query") {
    auto ctx = run(load("rel p(int). rel q(int). q(X) :- p(X). query q(X)."), SemiringSpec::addMult());
    CHECK(query(ctx, "q").empty());
    CHECK(codeOf([&] { query(ctx, "p"); }) == ErrorCode::UnknownQuery);
}

TEST_CASE("query constants filter tuples") {
    auto ctx = run(load(kPath), SemiringSpec::boolean());
    logic::Atom atom = logic::parseSource("query path(1, X).").queries[0].atom;
    CHECK(queryAtom(ctx, atom).size() == 3);
    logic::Atom self = logic::parseSource("query path(X, X).").queries[0].atom;
    CHECK(queryAtom(ctx, self).empty());
}

TEST_CASE("stratified negation") {
    auto ctx = run(load(R"(
        rel node(int). rel edge(int, int). rel reach(int). rel unreached(int).
        node(1). node(2). node(3). node(4). edge(1, 2). edge(2, 3).
        reach(1).
        reach(Y) :- reach(X), edge(X, Y).
        unreached(X) :- node(X), not reach(X).
        query unreached(X).
    )"), SemiringSpec::boolean());
    auto rows = query(ctx, "unreached");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].tuple[0] == Value::integer(4));
}

TEST_CASE("negation with a wildcard") {
    auto ctx = run(load(R"(
        rel node(int). rel edge(int, int). rel sink(int).
        node(1). node(2). node(3). edge(1, 2). edge(2, 3).
        sink(X) :- node(X), not edge(X, _).
        query sink(X).
    )"), SemiringSpec::addMult());
    auto rows = query(ctx, "sink");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].tuple[0] == Value::integer(3));
}

TEST_CASE("unbounded arithmetic recursion is reported") {
    auto cp = load("rel n(int). n(0). n(Y) :- n(X), Y == X + 1.");
    CHECK(codeOf([&] { run(cp, SemiringSpec::boolean()); }) == ErrorCode::NonTermination);
    auto bounded = run(load("rel n(int). n(0). n(Y) :- n(X), Y == X + 1, X < 20."), SemiringSpec::boolean());
    CHECK(bounded.relation("n").tuples.size() == 21);
}

TEST_CASE("cyclic probabilistic program converges") {
    const char* src = R"(
        rel edge(int, int). rel path(int, int).
        0.5::edge(1, 2). 0.5::edge(2, 1). 0.9::edge(2, 3).
        path(X, Y) :- edge(X, Y).
        path(X, Z) :- path(X, Y), edge(Y, Z).
        query path(A, B).
    )";
    auto cp = load(src);
    for (auto spec : {SemiringSpec::addMult(), SemiringSpec::maxMin(), SemiringSpec::topK(kUnboundedK),
                 SemiringSpec::topK(1)}) {
        auto ctx = run(cp, spec);
        for (const auto& r : query(ctx, "path")) {
            CHECK(r.probability >= 0.0);
            CHECK(r.probability <= 1.0);
        }
    }
    auto exact = run(cp, SemiringSpec::topK(kUnboundedK));
    logic::Atom a = logic::parseSource("query path(1, 3).").queries[0].atom;
    auto rows = queryAtom(exact, a);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].probability == doctest::Approx(0.5 * 0.9));
    auto maxmin = run(cp, SemiringSpec::maxMin());
    CHECK(queryAtom(maxmin, a)[0].probability == doctest::Approx(0.5));
}

TEST_CASE("evaluate is idempotent") {
    auto cp = load(kPath);
    for (auto spec : {SemiringSpec::boolean(), SemiringSpec::addMult(), SemiringSpec::topK(2)}) {
        auto ctx = run(cp, spec);
        auto once = ctx.relations();
        evaluate(ctx);
        REQUIRE(once.size() == ctx.relations().size());
        for (const auto& [name, rel] : once) {
            const auto& again = ctx.relation(name).tuples;
            REQUIRE(rel.tuples.size() == again.size());
            for (const auto& [t, tag] : rel.tuples) {
                CHECK(provenance::sr_equal(spec, tag, again.at(t)));
            }
        }
    }
}

TEST_CASE("rule order does not change results") {
    const char* a = R"(
        rel e(int, int). rel p(int, int).
        0.3::e(1, 2). 0.6::e(2, 3). 0.7::e(1, 3). 0.2::e(3, 1).
        p(X, Y) :- e(X, Y).
        p(X, Z) :- e(X, Y), p(Y, Z).
        query p(A, B).
    )";
    const char* b = R"(
        rel e(int, int). rel p(int, int).
        p(X, Z) :- e(X, Y), p(Y, Z).
        p(X, Y) :- e(X, Y).
        0.3::e(1, 2). 0.6::e(2, 3). 0.7::e(1, 3). 0.2::e(3, 1).
        query p(A, B).
    )";
    for (auto spec : {SemiringSpec::boolean(), SemiringSpec::maxMin(), SemiringSpec::addMult(),
                 SemiringSpec::topK(kUnboundedK)}) {
        auto ra = query(run(load(a), spec), "p");
        auto rb = query(run(load(b), spec), "p");
        REQUIRE(ra.size() == rb.size());
        for (std::size_t i = 0; i < ra.size(); ++i) {
            CHECK(ra[i].tuple == rb[i].tuple);
            CHECK(ra[i].probability == rb[i].probability);
        }
    }
}

TEST_CASE("arithmetic guards and float columns") {
    auto ctx = run(load(R"(
        rel v(int). rel w(float). rel d(int, int).
        v(1). v(2). v(3).
        w(Z) :- v(X), Z == X * 2.
        d(X, Y) :- v(X), v(Y), X < Y, Y - X != 2.
        query d(X, Y).
    )"), SemiringSpec::boolean());
    CHECK(ctx.relation("w").tuples.count(Tuple{Value::real(6.0)}) == 1);
    CHECK(query(ctx, "d").size() == 2);
}
