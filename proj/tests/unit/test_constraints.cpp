#include "doctest.h"

#include "nesy/constraints/constraints.h"
#include "nesy/error.h"
#include "nesy/verify/suites.h"

#include <cmath>
#include <functional>
#include <random>

using namespace nesy;
using namespace nesy::constraints;

namespace {

std::vector<double> bern(double p) {
    return {1.0 - p, p};
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

std::vector<double> softmax(const std::vector<double>& z, double scale) {
    double mx = *std::max_element(z.begin(), z.end());
    std::vector<double> p;
    double s = 0;
    for (double v : z) {
        p.push_back(std::exp(scale * (v - mx)));
        s += p.back();
    }
    for (auto& v : p) {
        v /= s;
    }
    return p;
}

Expr digitsSumTo(int target) {
    std::vector<Expr> pairs;
    for (int a = 0; a <= 9; ++a) {
        int b = target - a;
        if (b >= 0 && b <= 9) {
            pairs.push_back(andL({leaf("d1", static_cast<std::size_t>(a)), leaf("d2", static_cast<std::size_t>(b))}));
        }
    }
    return orL(std::move(pairs));
}

/** Exact violation probability by enumerating every joint assignment. */
double exactViolation(const Expr& e, const Assignments& a) {
    auto vars = variablesOf(e);
    std::vector<std::size_t> digits(vars.size(), 0);
    double total = 0;
    while (true) {
        HardAssignment h;
        double w = 1.0;
        for (std::size_t i = 0; i < vars.size(); ++i) {
            h[vars[i]] = digits[i];
            w *= a.at(vars[i])[digits[i]];
        }
        if (!hard_eval(e, h)) {
            total += w;
        }
        std::size_t i = 0;
        for (; i < vars.size(); ++i) {
            if (++digits[i] < a.at(vars[i]).size()) {
                break;
            }
            digits[i] = 0;
        }
        if (i == vars.size()) {
            return total;
        }
    }
}

}  // namespace

TEST_CASE("product t-norm examples") {
    Assignments a{{"a", bern(0.8)}, {"b", bern(0.5)}, {"c", bern(0.4)}};
    CHECK(soft_eval(andL({is("a"), is("b")}), a) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(soft_eval(ifL(is("a"), is("c")), a) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(soft_eval(existsL(std::vector<std::string>{"b", "b2"}, [](const std::string& v) { return is(v); }),
                  {{"b", bern(0.5)}, {"b2", bern(0.5)}}) == doctest::Approx(0.75));
    CHECK(soft_eval(notL(is("a")), a) == doctest::Approx(0.2));
    CHECK(soft_eval(orL({is("a"), is("b")}), a) == doctest::Approx(0.9));
    CHECK(soft_eval(andL({}), a) == 1.0);
    CHECK(soft_eval(orL({}), a) == 0.0);
}

TEST_CASE("exactL is structural over a whole categorical") {
    Assignments a{{"d", {0.2, 0.3, 0.5}}};
    CHECK(soft_eval(exactL(ConceptVar::categorical("d", 3)), a) == 1.0);
    CHECK(soft_eval(exactL({leaf("d", 0), leaf("d", 1)}), a) == doctest::Approx(0.5));
    CHECK(soft_eval(exactL({leaf("d", 1), leaf("d", 2), leaf("d", 2)}), a) == doctest::Approx(0.7));
    auto g = soft_loss_grad(exactL(ConceptVar::categorical("d", 3)), a);
    CHECK(g.loss == 0.0);
    CHECK(g.grads.at("d") == std::vector<double>{0, 0, 0});
}

TEST_CASE("soft loss gradients") {
    Assignments a{{"a", bern(0.8)}, {"b", bern(0.5)}};
    auto g = soft_loss_grad(andL({is("a"), is("b")}), a);
    CHECK(g.loss == doctest::Approx(0.6));
    CHECK(g.grads.at("a")[1] == doctest::Approx(-0.5));
    CHECK(g.grads.at("b")[1] == doctest::Approx(-0.8));
    CHECK(g.grads.at("a")[0] == 0.0);

    auto sat = soft_loss_grad(ifL(is("b"), is("a")), a);
    CHECK(sat.loss == 0.0);
    CHECK(sat.grads.at("a") == std::vector<double>{0, 0});
    CHECK(sat.grads.at("b") == std::vector<double>{0, 0});

    auto kink = soft_loss_grad(ifL(is("b"), is("b")), a);
    CHECK(std::isfinite(kink.grads.at("b")[1]));
}

TEST_CASE("soft loss gradients match finite differences") {
    auto r = verify::softLossGradients(1000, 3);
    INFO(r.firstFailure);
    CHECK(r.passed());
    CHECK(r.maxError < 1e-4);
}

TEST_CASE("soft evaluation of a 0/1 assignment is the hard evaluation") {
    std::mt19937_64 rng(17);
    auto vars = std::vector<std::string>{"a", "b", "c"};
    for (int trial = 0; trial < 500; ++trial) {
        HardAssignment h;
        Assignments a;
        for (const auto& v : vars) {
            std::size_t val = rng() % 3;
            h[v] = val;
            a[v] = {0, 0, 0};
            a[v][val] = 1.0;
        }
        auto lf = [&] { return leaf(vars[rng() % 3], rng() % 3); };
        std::function<Expr(int)> gen = [&](int depth) -> Expr {
            if (depth == 0) {
                return lf();
            }
            switch (rng() % 6) {
            case 0:
                return andL({gen(depth - 1), gen(depth - 1)});
            case 1:
                return orL({gen(depth - 1), gen(depth - 1)});
            case 2:
                return notL(gen(depth - 1));
            case 3:
                return ifL(gen(depth - 1), gen(depth - 1));
            case 4:
                return exactL({gen(depth - 1), gen(depth - 1), lf()});
            default:
                return existsL({gen(depth - 1), lf()});
            }
        };
        Expr e = gen(3);
        CHECK(soft_eval(e, a) == (hard_eval(e, h) ? 1.0 : 0.0));
    }
}

TEST_CASE("sampling loss") {
    Assignments a{{"a", bern(0.5)}, {"b", bern(0.5)}};
    auto taut = sampling_loss(orL({is("a"), notL(is("a"))}), a, 1000, 1);
    CHECK(taut.loss == 0.0);
    CHECK(taut.grads.at("a") == std::vector<double>{0, 0});
    CHECK(sampling_loss(andL({is("a"), notL(is("a"))}), a, 1000, 1).loss == 1.0);
    auto both = sampling_loss(andL({is("a"), is("b")}), a, 100000, 7);
    CHECK(std::abs(both.loss - 0.75) <= 0.01);
    CHECK(both.grads.at("a")[1] < both.grads.at("a")[0]);
    CHECK(sampling_loss(andL({is("a"), is("b")}), a, 100000, 7).loss == both.loss);
    CHECK(codeOf([&] { sampling_loss(is("a"), a, 0, 1); }) == ErrorCode::ConfigError);
}

TEST_CASE("sampling loss converges to the exact violation probability") {
    Assignments a{{"x", {0.2, 0.5, 0.3}}, {"y", bern(0.7)}, {"z", {0.6, 0.1, 0.3}}};
    std::vector<Expr> exprs{
            ifL(is("y"), leaf("x", 1)),
            orL({andL({leaf("x", 0), leaf("z", 2)}), notL(is("y"))}),
            exactL({leaf("x", 1), leaf("z", 0), is("y")}),
            existsL({leaf("x", 2), leaf("z", 1)}),
    };
    for (const auto& e : exprs) {
        CHECK(std::abs(sampling_loss(e, a, 100000, 3).loss - exactViolation(e, a)) <= 0.01);
    }
}

TEST_CASE("primal-dual updates") {
    LagrangeState s;
    s.eta = 1.0;
    auto step = primal_dual_step(s, {{"c", 0.6}});
    CHECK(step.augmentedLoss == 0.0);
    CHECK(s.multipliers.at("c") == doctest::Approx(0.4));
    step = primal_dual_step(s, {{"c", 1.0}});
    CHECK(step.weights.at("c") == doctest::Approx(0.4));
    CHECK(s.multipliers.at("c") == doctest::Approx(0.4));
    CHECK(codeOf([&] { primal_dual_step(s, {{"c", 1.5}}); }) == ErrorCode::DataError);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LagrangeState r;
    for (int i = 0; i < 10000; ++i) {
        primal_dual_step(r, {{"a", u(rng)}, {"b", u(rng)}});
        CHECK(r.multipliers["a"] >= 0.0);
        CHECK(r.multipliers["b"] >= 0.0);
    }
    CHECK(LagrangeState{}.eta == 0.01);
}

TEST_CASE("constrained MAP on digit pairs") {
    std::vector<double> d1(10, 0.02);
    std::vector<double> d2(10, 0.02);
    d1[3] = 0.82;
    d2[5] = 0.62;
    d2[6] = 0.2;
    Assignments a{{"d1", d1}, {"d2", d2}};
    auto m = constrained_map(a, {digitsSumTo(9)});
    CHECK_FALSE(m.infeasible);
    std::size_t bestA = 0;
    double best = -1e300;
    for (std::size_t x = 0; x <= 9; ++x) {
        double s = std::log(d1[x]) + std::log(d2[9 - x]);
        if (s > best) {
            best = s;
            bestA = x;
        }
    }
    CHECK(m.assignment.at("d1") == bestA);
    CHECK(m.assignment.at("d1") + m.assignment.at("d2") == 9);
    CHECK(m.logProb == doctest::Approx(best));

    auto free = constrained_map(a, {});
    CHECK(free.assignment == HardAssignment{{"d1", 3}, {"d2", 5}});
    auto none = constrained_map(a, {andL({leaf("d1", 1), leaf("d1", 2)})});
    CHECK(none.infeasible);
    CHECK(none.assignment == free.assignment);
}

TEST_CASE("constrained MAP errors and ties") {
    Assignments big;
    for (int i = 0; i < 7; ++i) {
        big["v" + std::to_string(i)] = std::vector<double>(10, 0.1);
    }
    CHECK(codeOf([&] { constrained_map(big, {}); }) == ErrorCode::SearchSpaceTooLarge);
    CHECK(codeOf([&] { constrained_map({{"a", bern(0.5)}}, {is("b")}); }) == ErrorCode::UnboundVariable);
    auto tie = constrained_map({{"a", bern(0.5)}, {"b", bern(0.5)}}, {orL({is("a"), is("b")})});
    CHECK(tie.assignment == HardAssignment{{"a", 0}, {"b", 1}});
    CHECK(codeOf([] { soft_eval(is("zz"), {}); }) == ErrorCode::UnboundVariable);
    CHECK(codeOf([] { checkWellTyped(leaf("a", 2), {ConceptVar::binary("a")}); }) == ErrorCode::TypeMismatch);
}

TEST_CASE("constrained MAP complies on random instances") {
    auto r = verify::mapCompliance(1000, 11);
    INFO(r.firstFailure);
    CHECK(r.passed());
    CHECK(r.excluded < r.instances);
}

TEST_CASE("constrained MAP is invariant to logit scaling") {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> z1(10);
        std::vector<double> z2(10);
        for (auto& v : z1) {
            v = n(rng);
        }
        for (auto& v : z2) {
            v = n(rng);
        }
        int target = static_cast<int>(rng() % 19);
        auto at = [&](double c) {
            return constrained_map({{"d1", softmax(z1, c)}, {"d2", softmax(z2, c)}}, {digitsSumTo(target)}).assignment;
        };
        CHECK(at(1.0) == at(2.5));
        CHECK(at(1.0) == at(0.4));
    }
}
