#include "doctest.h"

#include "fixtures.h"

#include "nesy/error.h"
#include "nesy/logic/parser.h"
#include "nesy/oracle/oracle.h"
#include "nesy/reasoner/eval.h"
#include "nesy/verify/random_program.h"
#include "nesy/verify/suites.h"

#include <algorithm>
#include <random>

using namespace nesy;
using namespace nesy::oracle;
using provenance::kUnboundedK;
using provenance::SemiringSpec;

namespace {

logic::ValidatedProgram parse(const std::string& src) {
    return logic::validate(logic::parseSource(src));
}

const char* kAnd = R"(
rel a(int). rel b(int). rel q(int).
0.6::a(1). 0.5::b(1).
q(X) :- a(X), b(X).
query q(X).
)";

FactWeights weightsOf(const logic::ValidatedProgram& vp, const reasoner::NeuralOutputs& outputs = {}) {
    return reasoner::bindWeights(vp.program, outputs);
}

reasoner::NeuralOutputs uniformDigits() {
    return {{"img_a", std::vector<double>(10, 0.1)}, {"img_b", std::vector<double>(10, 0.1)}};
}

/** P(q) with fact f forced true (p=1) or false (p=0), by a fresh enumeration. */
double conditioned(const logic::ValidatedProgram& vp, FactWeights w, FactId f, bool value, const logic::Atom& q) {
    w.groups[f.group].probs[f.member] = value ? 1.0 : 0.0;
    return enumerate_prob(vp, w, q);
}

}  // namespace

TEST_CASE("conjunction of independent facts") {
    auto vp = parse(kAnd);
    auto w = weightsOf(vp);
    const auto& q = vp.query("q").atom;
    CHECK(enumerate_prob(vp, w, q) == doctest::Approx(0.3).epsilon(1e-15));
    auto g = enumerate_grad(vp, w, q);
    CHECK(g.value == doctest::Approx(0.3));
    CHECK(g.grad.at(FactId{0, 0}) == doctest::Approx(0.5));
    CHECK(g.grad.at(FactId{1, 0}) == doctest::Approx(0.6));
}

TEST_CASE("single fact gradient is one") {
    auto vp = parse("rel a(int). 0.3::a(1). query a(X).");
    auto g = enumerate_grad(vp, weightsOf(vp), vp.query("a").atom);
    CHECK(g.value == doctest::Approx(0.3));
    CHECK(g.grad.at(FactId{0, 0}) == 1.0);
}

TEST_CASE("unsatisfiable query has probability zero") {
    auto vp = parse(R"(
rel a(int). rel q(int).
0.7::a(1).
q(X) :- a(X), X > 5.
query q(X).
)");
    CHECK(enumerate_prob(vp, weightsOf(vp), vp.query("q").atom) == 0.0);
    CHECK(enumerate_all(vp, weightsOf(vp), vp.query("q").atom).empty());
}

TEST_CASE("MNIST sum under uniform digits") {
    auto vp = parse(fixtures::kMnistSum);
    auto w = weightsOf(vp, uniformDigits());
    auto q = vp.query("sum2").atom;
    auto all = enumerate_all(vp, w, q);
    REQUIRE(all.size() == 19);
    double total = 0;
    for (const auto& [t, p] : all) {
        total += p;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
    CHECK(all.at(Tuple{Value::integer(0)}) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(all.at(Tuple{Value::integer(9)}) == doctest::Approx(0.1).epsilon(1e-12));
    q.args[0] = logic::Term::constantOf(Value::integer(0));
    CHECK(enumerate_prob(vp, w, q) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("worlds: weights sum to one and each disjunction picks exactly one member") {
    auto vp = parse(R"(
rel c(int). rel a(int).
0.2::c(1); 0.3::c(2); 0.5::c(3).
0.4::a(1). 0.9::a(2).
query c(X).
)");
    auto worlds = enumerateWorlds(vp.program, weightsOf(vp));
    CHECK(worlds.size() == 12);
    double total = 0;
    for (const auto& [world, weight] : worlds) {
        total += weight;
        CHECK(world.nadChoices.size() == 1);
        CHECK(worldFacts(vp.program, world)["c"].size() == 1);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(variableCount(vp.program) == 3);
}

TEST_CASE("too many worlds") {
    std::string src = "rel a(int).\n";
    for (int i = 0; i < 21; ++i) {
        src += "0.5::a(" + std::to_string(i) + ").\n";
    }
    src += "query a(X).\n";
    auto vp = parse(src);
    CHECK_THROWS_AS(enumerate_prob(vp, weightsOf(vp), vp.query("a").atom), Error);
    try {
        enumerate_prob(vp, weightsOf(vp), vp.query("a").atom);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooManyWorlds);
    }
}

TEST_CASE("boolean evaluator handles negation and recursion") {
    auto vp = parse(R"(
rel e(int, int). rel n(int). rel p(int, int). rel q(int).
e(1, 2). e(2, 3). n(3).
p(X, Y) :- e(X, Y).
p(X, Z) :- p(X, Y), e(Y, Z).
q(Y) :- p(X, Y), not n(Y).
query q(X).
)");
    auto model = evaluateBoolean(vp, {});
    CHECK(model["p"].size() == 3);
    CHECK(model["q"] == std::set<Tuple>{{Value::integer(2)}});
}

TEST_CASE("conditioning identity on random programs") {
    for (std::uint64_t s = 0; s < 40; ++s) {
        auto rp = verify::randomProgram(1000 + s);
        auto w = weightsOf(rp.program);
        auto g = enumerate_grad(rp.program, w, rp.query);
        for (std::uint32_t gi = 0; gi < w.groups.size(); ++gi) {
            if (w.isCategorical(gi)) {
                continue;
            }
            for (std::uint32_t m = 0; m < w.groups[gi].probs.size(); ++m) {
                FactId f{gi, m};
                double identity = conditioned(rp.program, w, f, true, rp.query) -
                                  conditioned(rp.program, w, f, false, rp.query);
                CHECK(std::abs(g.grad.at(f) - identity) < 1e-12);
            }
        }
    }
}

TEST_CASE("random programs are deterministic and small") {
    auto a = verify::randomProgram(42);
    auto b = verify::randomProgram(42);
    CHECK(a.source == b.source);
    for (std::uint64_t s = 0; s < 200; ++s) {
        auto rp = verify::randomProgram(s);
        CHECK(variableCount(rp.program.program) <= 10);
    }
}

TEST_CASE("reasoner matches the oracle on random programs") {
    auto r = verify::oracleProbabilities(200, 1);
    INFO(r.firstFailure);
    CHECK(r.passed());
    CHECK(r.maxError <= 1e-9);
}

TEST_CASE("reasoner gradients match the oracle on random programs") {
    auto r = verify::oracleGradients(200, 1);
    INFO(r.firstFailure);
    CHECK(r.passed());
}

TEST_CASE("boolean reasoner equals classical semantics") {
    auto r = verify::booleanSemantics(100, 7);
    INFO(r.firstFailure);
    CHECK(r.passed());
}

TEST_CASE("rule order does not change probabilities") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        auto rp = verify::randomProgram(500 + s);
        auto shuffled = rp.program.program;
        std::mt19937_64 rng(s);
        std::shuffle(shuffled.rules.begin(), shuffled.rules.end(), rng);
        for (auto spec : {SemiringSpec::boolean(), SemiringSpec::maxMin(), SemiringSpec::addMult(),
                     SemiringSpec::topK(kUnboundedK)}) {
            auto a = reasoner::run(reasoner::compile(rp.program), spec);
            auto b = reasoner::run(reasoner::compile(logic::validate(shuffled)), spec);
            auto ra = reasoner::queryAtom(a, rp.query);
            auto rb = reasoner::queryAtom(b, rp.query);
            REQUIRE(ra.size() == rb.size());
            for (std::size_t i = 0; i < ra.size(); ++i) {
                CHECK(ra[i].tuple == rb[i].tuple);
                CHECK(ra[i].probability == rb[i].probability);
            }
        }
    }
}
