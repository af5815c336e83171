#include "nesy/verify/suites.h"

#include "nesy/error.h"
#include "nesy/oracle/oracle.h"
#include "nesy/reasoner/eval.h"
#include "nesy/verify/random_program.h"

#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

namespace nesy::verify {

using provenance::FactId;
using provenance::FactWeights;
using provenance::GroupWeights;
using provenance::Proof;
using provenance::ProofSet;
using provenance::SemiringKind;
using provenance::SemiringSpec;
using provenance::Tag;

void SuiteResult::fail(std::string what) {
    if (failures++ == 0) {
        firstFailure = std::move(what);
    }
}

double relativeError(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-3});
}

namespace {

class Timer {
public:
    explicit Timer(SuiteResult& r) : r_(r), start_(std::chrono::steady_clock::now()) {}
    ~Timer() {
        r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    SuiteResult& r_;
    std::chrono::steady_clock::time_point start_;
};

logic::Atom groundAtom(const logic::Atom& pattern, const Tuple& t) {
    logic::Atom a = pattern;
    for (std::size_t i = 0; i < t.size(); ++i) {
        a.args[i] = logic::Term::constantOf(t[i]);
    }
    return a;
}

std::string tupleText(const Tuple& t) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        os << (i ? ", " : "") << t[i].toString();
    }
    return os.str() + ")";
}

}  // namespace

SuiteResult oracleProbabilities(std::size_t programs, std::uint64_t seed, double tolerance) {
    SuiteResult r("oracle-probability");
    Timer timer(r);
    for (std::size_t i = 0; i < programs; ++i) {
        RandomProgram rp = randomProgram(seed + i);
        auto ctx = reasoner::run(reasoner::compile(rp.program), SemiringSpec::topK(provenance::kUnboundedK));
        std::map<Tuple, double> got;
        for (const auto& q : reasoner::queryAtom(ctx, rp.query)) {
            got[q.tuple] = q.probability;
        }
        auto expected = oracle::enumerate_all(rp.program, ctx.weights(), rp.query);
        std::set<Tuple> keys;
        for (const auto& [t, p] : got) {
            keys.insert(t);
        }
        for (const auto& [t, p] : expected) {
            keys.insert(t);
        }
        ++r.instances;
        for (const auto& t : keys) {
            double a = got.count(t) ? got[t] : 0.0;
            double b = expected.count(t) ? expected[t] : 0.0;
            double err = std::abs(a - b);
            r.maxError = std::max(r.maxError, err);
            if (!(err <= tolerance)) {
                std::ostringstream os;
                os << "program " << seed + i << " tuple " << tupleText(t) << ": reasoner " << a << " oracle " << b
                   << "\n" << rp.source;
                r.fail(os.str());
                break;
            }
        }
    }
    return r;
}

SuiteResult oracleGradients(std::size_t programs, std::uint64_t seed, double tolerance) {
    SuiteResult r("oracle-gradient");
    Timer timer(r);
    for (std::size_t i = 0; i < programs; ++i) {
        RandomProgram rp = randomProgram(seed + i);
        auto ctx = reasoner::run(reasoner::compile(rp.program), SemiringSpec::topKGrad(provenance::kUnboundedK));
        const FactWeights& w = ctx.weights();
        ++r.instances;
        bool ok = true;
        for (const auto& q : reasoner::queryAtom(ctx, rp.query)) {
            auto expected = oracle::enumerate_grad(rp.program, w, groundAtom(rp.query, q.tuple));
            std::set<std::uint32_t> involved;
            for (const auto& [f, d] : q.grad->grad) {
                involved.insert(f.group);
            }
            auto report = [&](const std::string& what) {
                std::ostringstream os;
                os << "program " << seed + i << " tuple " << tupleText(q.tuple) << ": " << what << "\n" << rp.source;
                r.fail(os.str());
                ok = false;
            };
            double dv = std::abs(q.grad->value - expected.value);
            r.maxError = std::max(r.maxError, dv);
            if (!(dv <= tolerance)) {
                report("value mismatch");
            }
            for (std::uint32_t g = 0; ok && g < w.groups.size(); ++g) {
                const auto& probs = w.groups[g].probs;
                for (std::uint32_t m = 0; ok && m < probs.size(); ++m) {
                    FactId f{g, m};
                    double o = expected.grad.at(f);
                    if (w.isCategorical(g) && !involved.count(g)) {
                        // The query ignores this group; the oracle's partials are its
                        // (constant) marginal mass, which a normalized head cannot move.
                        double err = std::abs(o - expected.grad.at(FactId{g, 0}));
                        r.maxError = std::max(r.maxError, err);
                        if (!(err <= tolerance)) {
                            report("uninvolved disjunction partials differ");
                        }
                        continue;
                    }
                    double a = q.grad->partial(f, w);
                    double err = std::abs(a - o);
                    r.maxError = std::max(r.maxError, err);
                    if (!(err <= tolerance)) {
                        std::ostringstream os;
                        os << "partial " << f << ": reasoner " << a << " oracle " << o;
                        report(os.str());
                    }
                }
            }
            if (!ok) {
                break;
            }
        }
    }
    return r;
}

SuiteResult booleanSemantics(std::size_t programs, std::uint64_t seed) {
    SuiteResult r("boolean-semantics");
    Timer timer(r);
    RandomProgramOptions opts;
    opts.allowNegation = true;
    for (std::size_t i = 0; i < programs; ++i) {
        RandomProgram rp = randomProgram(seed + i, opts);
        auto ctx = reasoner::run(reasoner::compile(rp.program), SemiringSpec::boolean());
        const auto& prog = rp.program.program;
        oracle::BooleanModel inputs;
        for (std::uint32_t g = 0; g < prog.factGroups.size(); ++g) {
            const auto& group = prog.factGroups[g];
            for (std::uint32_t m = 0; m < group.members.size(); ++m) {
                if (ctx.weights().prob(FactId{g, m}) > 0.5) {
                    Tuple t;
                    for (const auto& a : group.members[m].atom.args) {
                        t.push_back(a.constant);
                    }
                    inputs[group.relation].insert(std::move(t));
                }
            }
        }
        auto expected = oracle::evaluateBoolean(rp.program, inputs);
        ++r.instances;
        for (const auto& decl : prog.relations) {
            std::set<Tuple> got;
            for (const auto& [t, tag] : ctx.relation(decl.name).tuples) {
                if (std::get<bool>(tag)) {
                    got.insert(t);
                }
            }
            if (got != expected[decl.name]) {
                r.fail("program " + std::to_string(seed + i) + " relation " + decl.name + "\n" + rp.source);
                r.maxError = 1.0;
                break;
            }
        }
    }
    return r;
}

namespace {

class LawChecker {
public:
    LawChecker(SemiringSpec spec, std::uint64_t seed) : spec_(spec), rng_(seed) {
        weights_.groups.push_back(GroupWeights{logic::FactGroupKind::Independent, {0.5, 0.25, 0.75, 0.125}});
        weights_.groups.push_back(GroupWeights{logic::FactGroupKind::CategoricalAD, {0.5, 0.25, 0.25}});
    }

    Tag random() {
        std::uniform_int_distribution<int> special(0, 15);
        int s = special(rng_);
        if (s == 0) {
            return provenance::sr_zero(spec_);
        }
        if (s == 1) {
            return provenance::sr_one(spec_);
        }
        switch (spec_.kind) {
        case SemiringKind::Boolean:
            return std::uniform_int_distribution<int>(0, 1)(rng_) == 1;
        case SemiringKind::MaxMin:
        case SemiringKind::AddMultProb:
            return std::uniform_int_distribution<int>(0, 1024)(rng_) / 1024.0;
        default:
            break;
        }
        std::vector<Proof> proofs;
        std::size_t n = std::uniform_int_distribution<std::size_t>(1, 3)(rng_);
        for (std::size_t i = 0; i < n; ++i) {
            Proof p;
            std::size_t len = std::uniform_int_distribution<std::size_t>(1, 3)(rng_);
            for (std::size_t j = 0; j < len; ++j) {
                std::uint32_t g = std::uniform_int_distribution<std::uint32_t>(0, 1)(rng_);
                std::uint32_t m = std::uniform_int_distribution<std::uint32_t>(
                        0, static_cast<std::uint32_t>(weights_.groups[g].probs.size() - 1))(rng_);
                p.facts.push_back(FactId{g, m});
            }
            std::sort(p.facts.begin(), p.facts.end());
            p.facts.erase(std::unique(p.facts.begin(), p.facts.end()), p.facts.end());
            bool contradictory = false;
            for (std::size_t j = 1; j < p.facts.size(); ++j) {
                contradictory |= weights_.exclusive(p.facts[j - 1], p.facts[j]);
            }
            if (!contradictory) {
                proofs.push_back(std::move(p));
            }
        }
        return ProofSet::from(std::move(proofs), spec_.k, weights_);
    }

    Tag add(const Tag& a, const Tag& b) const {
        return provenance::sr_add(spec_, a, b, weights_);
    }
    Tag mul(const Tag& a, const Tag& b) const {
        return provenance::sr_mul(spec_, a, b, weights_);
    }

    /** Name of the first violated law, or empty. */
    std::string check(const Tag& a, const Tag& b, const Tag& c) const {
        Tag zero = provenance::sr_zero(spec_);
        Tag one = provenance::sr_one(spec_);
        if (!(add(add(a, b), c) == add(a, add(b, c)))) {
            return "add associativity";
        }
        if (!(add(a, b) == add(b, a))) {
            return "add commutativity";
        }
        if (!(mul(mul(a, b), c) == mul(a, mul(b, c)))) {
            return "mul associativity";
        }
        if (!(mul(a, b) == mul(b, a))) {
            return "mul commutativity";
        }
        if (!(add(a, zero) == a) || !(add(zero, a) == a)) {
            return "additive identity";
        }
        if (!(mul(a, one) == a) || !(mul(one, a) == a)) {
            return "multiplicative identity";
        }
        if (!(mul(a, zero) == zero) || !(mul(zero, a) == zero)) {
            return "annihilation";
        }
        return {};
    }

private:
    SemiringSpec spec_;
    std::mt19937_64 rng_;
    FactWeights weights_;
};

}  // namespace

SuiteResult semiringLaws(const SemiringSpec& spec, std::size_t triples, std::uint64_t seed) {
    SemiringSpec s = spec;
    if (s.proofBased()) {
        s.k = 64;
    }
    SuiteResult r("semiring-laws " + s.toString());
    Timer timer(r);
    LawChecker checker(s, seed);
    for (std::size_t i = 0; i < triples; ++i) {
        Tag a = checker.random();
        Tag b = checker.random();
        Tag c = checker.random();
        ++r.instances;
        std::string broken = checker.check(a, b, c);
        if (!broken.empty()) {
            r.maxError = 1.0;
            r.fail(broken + " on " + provenance::tagToString(a) + ", " + provenance::tagToString(b) + ", " +
                    provenance::tagToString(c));
        }
    }
    return r;
}

SuiteResult wmcGradients(std::size_t instances, std::uint64_t seed, const WmcGradFn& grad) {
    SuiteResult r("wmc-gradient");
    Timer timer(r);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    auto below = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    for (std::size_t i = 0; i < instances; ++i) {
        FactWeights w;
        std::size_t total = 0;
        std::size_t groups = below(3);
        for (std::size_t g = 0; g < groups; ++g) {
            GroupWeights gw{logic::FactGroupKind::CategoricalAD, {}};
            std::size_t size = 2 + below(3);
            double sum = 0;
            for (std::size_t m = 0; m < size; ++m) {
                gw.probs.push_back(unit(rng));
                sum += gw.probs.back();
            }
            for (auto& p : gw.probs) {
                p /= sum;
            }
            total += size;
            w.groups.push_back(std::move(gw));
        }
        GroupWeights ind{logic::FactGroupKind::Independent, {}};
        for (std::size_t n = 1 + below(10 - total); n > 0; --n) {
            ind.probs.push_back(unit(rng));
        }
        w.groups.push_back(std::move(ind));

        std::vector<FactId> all;
        for (std::uint32_t g = 0; g < w.groups.size(); ++g) {
            for (std::uint32_t m = 0; m < w.groups[g].probs.size(); ++m) {
                all.push_back(FactId{g, m});
            }
        }
        std::vector<Proof> proofs;
        for (std::size_t n = 1 + below(4); n > 0; --n) {
            Proof p;
            for (std::size_t len = 1 + below(3); len > 0; --len) {
                p.facts.push_back(all[below(all.size())]);
            }
            std::sort(p.facts.begin(), p.facts.end());
            p.facts.erase(std::unique(p.facts.begin(), p.facts.end()), p.facts.end());
            proofs.push_back(std::move(p));
        }
        std::vector<Proof> consistent;
        for (auto& p : proofs) {
            bool bad = false;
            for (std::size_t j = 1; j < p.facts.size(); ++j) {
                bad |= w.exclusive(p.facts[j - 1], p.facts[j]);
            }
            if (!bad) {
                consistent.push_back(std::move(p));
            }
        }
        ProofSet ps = ProofSet::from(std::move(consistent), provenance::kUnboundedK, w);

        ++r.instances;
        auto g = grad(ps, w);
        if (g.value != provenance::wmc(ps, w)) {
            r.fail("instance " + std::to_string(i) + ": value differs from wmc");
            continue;
        }
        for (FactId f : all) {
            FactWeights hi = w;
            FactWeights lo = w;
            hi.groups[f.group].probs[f.member] += kFiniteDifferenceStep;
            lo.groups[f.group].probs[f.member] -= kFiniteDifferenceStep;
            double numeric = (provenance::wmc(ps, hi) - provenance::wmc(ps, lo)) / (2 * kFiniteDifferenceStep);
            double err = relativeError(g.partial(f, w), numeric);
            r.maxError = std::max(r.maxError, err);
            if (!(err < kGradientTolerance)) {
                std::ostringstream os;
                os << "instance " << i << " fact " << f << ": analytic " << g.partial(f, w) << " numeric " << numeric;
                r.fail(os.str());
                break;
            }
        }
    }
    return r;
}

}  // namespace nesy::verify
