#include "nesy/constraints/constraints.h"
#include "nesy/verify/suites.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace nesy::verify {

using namespace constraints;

namespace {

class ExprGenerator {
public:
    explicit ExprGenerator(std::uint64_t seed) : rng_(seed) {}

    std::size_t below(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
    }

    Assignments assignments(std::size_t vars) {
        Assignments a;
        std::uniform_real_distribution<double> w(0.05, 1.0);
        for (std::size_t v = 0; v < vars; ++v) {
            std::vector<double> p(2 + below(3));
            double s = 0;
            for (auto& x : p) {
                x = w(rng_);
                s += x;
            }
            for (auto& x : p) {
                x /= s;
            }
            a["v" + std::to_string(v)] = std::move(p);
        }
        return a;
    }

    Expr expr(const Assignments& a, int depth) {
        auto randomLeaf = [&] {
            auto it = std::next(a.begin(), static_cast<std::ptrdiff_t>(below(a.size())));
            return leaf(it->first, below(it->second.size()));
        };
        if (depth == 0 || below(4) == 0) {
            return randomLeaf();
        }
        auto some = [&](std::size_t lo, std::size_t hi) {
            std::vector<Expr> out;
            for (std::size_t n = lo + below(hi - lo + 1); n > 0; --n) {
                out.push_back(expr(a, depth - 1));
            }
            return out;
        };
        switch (below(6)) {
        case 0:
            return andL(some(1, 3));
        case 1:
            return orL(some(1, 3));
        case 2:
            return notL(expr(a, depth - 1));
        case 3:
            return ifL(expr(a, depth - 1), expr(a, depth - 1));
        case 4:
            return existsL(some(1, 3));
        default: {
            if (below(2) == 0) {
                auto it = std::next(a.begin(), static_cast<std::ptrdiff_t>(below(a.size())));
                return exactL(ConceptVar::categorical(it->first, it->second.size()));
            }
            return exactL(some(1, 3));
        }
        }
    }

private:
    std::mt19937_64 rng_;
};

/** Distance of the instance from the nearest non-differentiable point of the soft semantics. */
double kinkDistance(const Expr& e, const Assignments& a) {
    double d = std::numeric_limits<double>::infinity();
    if (e.kind() == Expr::Kind::If) {
        d = std::abs(soft_eval(e.children()[0], a) - soft_eval(e.children()[1], a));
    } else if (e.kind() == Expr::Kind::Exact && !isStructuralExact(e, a)) {
        double s = 0;
        for (const auto& c : e.children()) {
            s += soft_eval(c, a);
        }
        d = std::min({std::abs(s), std::abs(s - 1.0), std::abs(s - 2.0)});
    }
    for (const auto& c : e.children()) {
        d = std::min(d, kinkDistance(c, a));
    }
    return d;
}

double since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

SuiteResult softLossGradients(std::size_t instances, std::uint64_t seed) {
    SuiteResult r("constraint-gradient");
    auto start = std::chrono::steady_clock::now();
    ExprGenerator gen(seed);
    for (std::size_t i = 0; i < instances; ++i) {
        Assignments a = gen.assignments(1 + gen.below(4));
        Expr e = gen.expr(a, 3);
        if (kinkDistance(e, a) < 1e-4) {
            ++r.excluded;
            --i;
            continue;
        }
        SoftLoss analytic = soft_loss_grad(e, a);
        ++r.instances;
        for (const auto& [name, probs] : a) {
            for (std::size_t k = 0; k < probs.size(); ++k) {
                Assignments hi = a;
                Assignments lo = a;
                hi[name][k] += kFiniteDifferenceStep;
                lo[name][k] -= kFiniteDifferenceStep;
                double numeric = ((1.0 - soft_eval(e, hi)) - (1.0 - soft_eval(e, lo))) / (2 * kFiniteDifferenceStep);
                auto it = analytic.grads.find(name);
                double g = it == analytic.grads.end() ? 0.0 : it->second[k];
                double err = relativeError(g, numeric);
                r.maxError = std::max(r.maxError, err);
                if (!(err < kGradientTolerance)) {
                    std::ostringstream os;
                    os << "instance " << i << " " << e.toString() << " d/d" << name << "[" << k << "]: analytic " << g
                       << " numeric " << numeric;
                    r.fail(os.str());
                }
            }
        }
    }
    r.seconds = since(start);
    return r;
}

SuiteResult mapCompliance(std::size_t instances, std::uint64_t seed) {
    SuiteResult r("map-compliance");
    auto start = std::chrono::steady_clock::now();
    ExprGenerator gen(seed);
    for (std::size_t i = 0; i < instances; ++i) {
        Assignments a = gen.assignments(2 + gen.below(3));
        std::vector<Expr> hard;
        for (std::size_t n = 1 + gen.below(3); n > 0; --n) {
            hard.push_back(gen.expr(a, 2));
        }
        MapResult m = constrained_map(a, hard);
        ++r.instances;
        if (m.infeasible) {
            ++r.excluded;
            continue;
        }
        for (const auto& e : hard) {
            if (!hard_eval(e, m.assignment)) {
                r.maxError = 1.0;
                r.fail("instance " + std::to_string(i) + " violates " + e.toString());
                break;
            }
        }
    }
    r.seconds = since(start);
    return r;
}

}  // namespace nesy::verify
