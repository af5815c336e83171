#include "doctest.h"

#include "nesy/error.h"
#include "nesy/provenance/semiring.h"
#include "nesy/provenance/wmc.h"

#include <random>

using namespace nesy;
using namespace nesy::provenance;
using logic::FactGroupKind;

namespace {

FactWeights independent(std::vector<double> probs) {
    FactWeights w;
    for (double p : probs) {
        w.groups.push_back({FactGroupKind::Independent, {p}});
    }
    return w;
}

FactId fact(std::uint32_t g, std::uint32_t m = 0) {
    return FactId{g, m};
}

ProofSet proofs(std::vector<std::vector<FactId>> ps, const FactWeights& w, std::size_t k = kUnboundedK) {
    std::vector<Proof> out;
    for (auto& p : ps) {
        std::sort(p.begin(), p.end());
        out.push_back(Proof{p});
    }
    return ProofSet::from(out, k, w);
}

FactWeights twoDigits(double p = 0.1) {
    FactWeights w;
    w.groups.push_back({FactGroupKind::CategoricalAD, std::vector<double>(10, p)});
    w.groups.push_back({FactGroupKind::CategoricalAD, std::vector<double>(10, p)});
    return w;
}

}  // namespace

TEST_CASE("semiring identities") {
    CHECK(std::get<double>(sr_zero(SemiringSpec::maxMin())) == 0.0);
    CHECK(std::get<double>(sr_one(SemiringSpec::maxMin())) == 1.0);
    CHECK(std::get<ProofSet>(sr_zero(SemiringSpec::topK(3))).empty());
    auto one = std::get<ProofSet>(sr_one(SemiringSpec::topK(3)));
    REQUIRE(one.size() == 1);
    CHECK(one.proofs()[0].facts.empty());
}

TEST_CASE("scalar semiring operations") {
    FactWeights w;
    CHECK(std::get<double>(sr_add(SemiringSpec::maxMin(), 0.3, 0.7, w)) == 0.7);
    CHECK(std::get<double>(sr_mul(SemiringSpec::maxMin(), 0.3, 0.7, w)) == 0.3);
    CHECK(std::get<double>(sr_add(SemiringSpec::addMult(), 0.5, 0.5, w)) == 0.75);
    CHECK(std::get<double>(sr_mul(SemiringSpec::addMult(), 0.5, 0.5, w)) == 0.25);
    CHECK(std::get<bool>(sr_add(SemiringSpec::boolean(), false, true, w)));
    CHECK_FALSE(std::get<bool>(sr_mul(SemiringSpec::boolean(), false, true, w)));
}

TEST_CASE("top-k proofs operations") {
    auto w = independent({0.2, 0.9});
    auto spec = SemiringSpec::topK(1);
    auto sum = std::get<ProofSet>(sr_add(spec, ProofSet::single(fact(0)), ProofSet::single(fact(1)), w));
    REQUIRE(sum.size() == 1);
    CHECK(sum.proofs()[0].facts == std::vector<FactId>{fact(1)});

    auto prod = std::get<ProofSet>(
            sr_mul(SemiringSpec::topK(5), ProofSet::single(fact(0)), ProofSet::single(fact(1)), w));
    REQUIRE(prod.size() == 1);
    CHECK(prod.proofs()[0].facts == std::vector<FactId>{fact(0), fact(1)});

    FactWeights ad;
    ad.groups.push_back({FactGroupKind::CategoricalAD, {0.5, 0.5}});
    auto contradiction =
            std::get<ProofSet>(sr_mul(SemiringSpec::topK(5), ProofSet::single(fact(0, 0)), ProofSet::single(fact(0, 1)), ad));
    CHECK(contradiction.empty());
}

TEST_CASE("absorption and tie-breaking") {
    auto w = independent({0.5, 0.5, 0.5});
    auto s = proofs({{fact(0), fact(1)}, {fact(0)}, {fact(0)}, {fact(2), fact(1)}}, w);
    REQUIRE(s.size() == 2);
    CHECK(s.proofs()[0].facts == std::vector<FactId>{fact(0)});
    CHECK(s.proofs()[1].facts == std::vector<FactId>{fact(1), fact(2)});

    auto tie = proofs({{fact(2)}, {fact(1)}, {fact(0)}}, w, 2);
    REQUIRE(tie.size() == 2);
    CHECK(tie.proofs()[0].facts == std::vector<FactId>{fact(0)});
    CHECK(tie.proofs()[1].facts == std::vector<FactId>{fact(1)});
}

TEST_CASE("wmc examples") {
    auto w = independent({0.5, 0.5});
    CHECK(wmc(proofs({{fact(0)}, {fact(1)}}, w), w) == doctest::Approx(0.75).epsilon(1e-15));

    auto certain = twoDigits(0.0);
    certain.groups[0].probs[3] = 1.0;
    certain.groups[1].probs[5] = 1.0;
    CHECK(wmc(proofs({{fact(0, 3), fact(1, 5)}}, certain), certain) == 1.0);

    auto digits = twoDigits();
    std::vector<std::vector<FactId>> nine;
    for (std::uint32_t a = 0; a <= 9; ++a) {
        nine.push_back({fact(0, a), fact(1, 9 - a)});
    }
    CHECK(std::abs(wmc(proofs(nine, digits), digits) - 0.1) < 1e-12);
    CHECK(wmc(ProofSet(), digits) == 0.0);
    CHECK(wmc(ProofSet::certain(), digits) == 1.0);
}

TEST_CASE("wmc_grad examples") {
    auto w1 = independent({0.4});
    auto g1 = wmc_grad(ProofSet::single(fact(0)), w1);
    CHECK(g1.value == doctest::Approx(0.4));
    CHECK(g1.grad.at(fact(0)) == doctest::Approx(1.0));

    auto w2 = independent({0.5, 0.5});
    auto g2 = wmc_grad(proofs({{fact(0)}, {fact(1)}}, w2), w2);
    CHECK(g2.grad.at(fact(0)) == doctest::Approx(0.5));
    CHECK(g2.grad.at(fact(1)) == doctest::Approx(0.5));
    CHECK(g2.value == wmc(proofs({{fact(0)}, {fact(1)}}, w2), w2));
}

TEST_CASE("wmc_grad nAD partials include the shared rest term") {
    FactWeights w;
    w.groups.push_back({FactGroupKind::CategoricalAD, {0.2, 0.3, 0.5}});
    w.groups.push_back({FactGroupKind::Independent, {0.6}});
    // q <- a0 ; q <- b. P = 1 - (1 - 0.2)(1 - 0.6)
    auto s = proofs({{fact(0, 0)}, {fact(1)}}, w);
    auto g = wmc_grad(s, w);
    CHECK(g.value == doctest::Approx(1 - 0.8 * 0.4));
    CHECK(g.grad.at(fact(0, 0)) == doctest::Approx(1.0));
    CHECK(g.rest.at(0) == doctest::Approx(0.6));
    CHECK(g.partial(fact(0, 2), w) == doctest::Approx(0.6));
    CHECK(g.grad.at(fact(1)) == doctest::Approx(0.8));
}

TEST_CASE("wmc rejects too many variables") {
    std::vector<double> ps(25, 0.5);
    auto w = independent(ps);
    std::vector<Proof> big;
    for (std::uint32_t i = 0; i < 25; ++i) {
        big.push_back(Proof{{fact(i)}});
    }
    auto s = ProofSet::from(big, kUnboundedK, w);
    CHECK(wmcVariableCount(s, w) == 25);
    try {
        wmc(s, w);
        FAIL("expected TooManyFacts");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooManyFacts);
    }
}

TEST_CASE("wmc monotone under union and bounded") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        FactWeights w;
        w.groups.push_back({FactGroupKind::CategoricalAD, {}});
        double total = 0;
        for (int m = 0; m < 3; ++m) {
            w.groups[0].probs.push_back(u(rng));
            total += w.groups[0].probs.back();
        }
        for (double& p : w.groups[0].probs) {
            p /= total;
        }
        for (int i = 0; i < 5; ++i) {
            w.groups.push_back({FactGroupKind::Independent, {u(rng)}});
        }
        auto randomSet = [&] {
            std::vector<Proof> ps;
            int n = 1 + static_cast<int>(rng() % 3);
            for (int i = 0; i < n; ++i) {
                Proof p;
                if (rng() % 2) {
                    p.facts.push_back(fact(0, rng() % 3));
                }
                for (std::uint32_t g = 1; g <= 5; ++g) {
                    if (rng() % 3 == 0) {
                        p.facts.push_back(fact(g));
                    }
                }
                ps.push_back(p);
            }
            return ProofSet::from(ps, kUnboundedK, w);
        };
        auto a = randomSet();
        auto b = randomSet();
        auto u2 = std::get<ProofSet>(sr_add(SemiringSpec::topK(kUnboundedK), a, b, w));
        double pa = wmc(a, w);
        double pb = wmc(b, w);
        double pu = wmc(u2, w);
        CHECK(pu >= std::max(pa, pb) - 1e-15);
        CHECK(pu >= 0.0);
        CHECK(pu <= 1.0);
        CHECK(wmc_grad(u2, w).value == pu);
    }
}

TEST_CASE("semiring spec parsing") {
    CHECK(SemiringSpec::parse("topk:3") == SemiringSpec::topKGrad(3));
    CHECK(SemiringSpec::parse("exact") == SemiringSpec::topKGrad(kUnboundedK));
    CHECK(SemiringSpec::parse("maxmin") == SemiringSpec::maxMin());
    CHECK(SemiringSpec::parse(SemiringSpec::topKGrad(3).toString()) == SemiringSpec::topKGrad(3));
    for (const char* bad : {"topk:0", "topk:", "topk:x", "fuzzy"}) {
        try {
            SemiringSpec::parse(bad);
            FAIL("expected ConfigError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ConfigError);
        }
    }
}
