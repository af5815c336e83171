#include "nesy/constraints/constraints.h"

#include "nesy/error.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace nesy::constraints {

namespace {

using Kind = Expr::Kind;

double leafProb(const Expr& e, const Assignments& a) {
    auto it = a.find(e.var());
    if (it == a.end()) {
        throw Error(ErrorCode::UnboundVariable, "no prediction bound to concept", e.var());
    }
    if (e.value() >= it->second.size()) {
        throw Error(ErrorCode::TypeMismatch, "value " + std::to_string(e.value()) + " outside the domain of " + e.var(),
                e.var());
    }
    return it->second[e.value()];
}

/** Products of all-but-one entries without division. */
std::vector<double> leaveOneOut(const std::vector<double>& xs) {
    std::vector<double> out(xs.size(), 1.0);
    double prefix = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        out[i] = prefix;
        prefix *= xs[i];
    }
    double suffix = 1.0;
    for (std::size_t i = xs.size(); i-- > 0;) {
        out[i] *= suffix;
        suffix *= xs[i];
    }
    return out;
}

class Soft {
public:
    explicit Soft(const Assignments& a) : a_(a) {}

    double eval(const Expr& e) const {
        switch (e.kind()) {
        case Kind::Leaf:
            return leafProb(e, a_);
        case Kind::And: {
            double p = 1.0;
            for (const auto& c : e.children()) {
                p *= eval(c);
            }
            return p;
        }
        case Kind::Or:
        case Kind::Exists: {
            double q = 1.0;
            for (const auto& c : e.children()) {
                q *= 1.0 - eval(c);
            }
            return 1.0 - q;
        }
        case Kind::Not:
            return 1.0 - eval(e.children().at(0));
        case Kind::If: {
            double x = eval(e.children().at(0));
            double y = eval(e.children().at(1));
            return x <= y ? 1.0 : y / x;
        }
        case Kind::Exact: {
            if (isStructuralExact(e, a_)) {
                return 1.0;
            }
            double s = 0.0;
            for (const auto& c : e.children()) {
                s += eval(c);
            }
            return std::clamp(1.0 - std::abs(s - 1.0), 0.0, 1.0);
        }
        }
        return 0.0;
    }

    /** Adds upstream * d eval(e) into grads. */
    void back(const Expr& e, double upstream, Assignments& grads) const {
        if (upstream == 0.0) {
            return;
        }
        const auto& ch = e.children();
        switch (e.kind()) {
        case Kind::Leaf: {
            auto& g = grads[e.var()];
            g.resize(a_.at(e.var()).size(), 0.0);
            g[e.value()] += upstream;
            return;
        }
        case Kind::And: {
            std::vector<double> xs;
            for (const auto& c : ch) {
                xs.push_back(eval(c));
            }
            auto others = leaveOneOut(xs);
            for (std::size_t i = 0; i < ch.size(); ++i) {
                back(ch[i], upstream * others[i], grads);
            }
            return;
        }
        case Kind::Or:
        case Kind::Exists: {
            std::vector<double> xs;
            for (const auto& c : ch) {
                xs.push_back(1.0 - eval(c));
            }
            auto others = leaveOneOut(xs);
            for (std::size_t i = 0; i < ch.size(); ++i) {
                back(ch[i], upstream * others[i], grads);
            }
            return;
        }
        case Kind::Not:
            back(ch.at(0), -upstream, grads);
            return;
        case Kind::If: {
            double x = eval(ch[0]);
            double y = eval(ch[1]);
            if (x <= y) {
                return;
            }
            back(ch[0], -upstream * y / (x * x), grads);
            back(ch[1], upstream / x, grads);
            return;
        }
        case Kind::Exact: {
            if (isStructuralExact(e, a_)) {
                return;
            }
            double s = 0.0;
            for (const auto& c : ch) {
                s += eval(c);
            }
            double d = std::abs(s - 1.0);
            if (s == 1.0 || d >= 1.0) {
                return;
            }
            double slope = s > 1.0 ? -1.0 : 1.0;
            for (const auto& c : ch) {
                back(c, upstream * slope, grads);
            }
            return;
        }
        }
    }

private:
    const Assignments& a_;
};

}  // namespace

double soft_eval(const Expr& e, const Assignments& a) {
    return Soft(a).eval(e);
}

SoftLoss soft_loss_grad(const Expr& e, const Assignments& a) {
    Soft soft(a);
    SoftLoss out;
    out.loss = 1.0 - soft.eval(e);
    for (const auto& v : variablesOf(e)) {
        out.grads[v].assign(a.at(v).size(), 0.0);
    }
    soft.back(e, -1.0, out.grads);
    return out;
}

bool hard_eval(const Expr& e, const HardAssignment& h) {
    const auto& ch = e.children();
    switch (e.kind()) {
    case Kind::Leaf: {
        auto it = h.find(e.var());
        if (it == h.end()) {
            throw Error(ErrorCode::UnboundVariable, "no value for concept", e.var());
        }
        return it->second == e.value();
    }
    case Kind::And:
        return std::all_of(ch.begin(), ch.end(), [&](const Expr& c) { return hard_eval(c, h); });
    case Kind::Or:
    case Kind::Exists:
        return std::any_of(ch.begin(), ch.end(), [&](const Expr& c) { return hard_eval(c, h); });
    case Kind::Not:
        return !hard_eval(ch.at(0), h);
    case Kind::If:
        return !hard_eval(ch.at(0), h) || hard_eval(ch.at(1), h);
    case Kind::Exact:
        return std::count_if(ch.begin(), ch.end(), [&](const Expr& c) { return hard_eval(c, h); }) == 1;
    }
    return false;
}

SoftLoss sampling_loss(const Expr& e, const Assignments& a, std::size_t sampleCount, std::uint64_t seed) {
    if (sampleCount == 0) {
        throw Error(ErrorCode::ConfigError, "sampling loss needs at least one sample");
    }
    auto vars = variablesOf(e);
    SoftLoss out;
    std::vector<std::discrete_distribution<std::size_t>> dists;
    for (const auto& v : vars) {
        auto it = a.find(v);
        if (it == a.end()) {
            throw Error(ErrorCode::UnboundVariable, "no prediction bound to concept", v);
        }
        dists.emplace_back(it->second.begin(), it->second.end());
        out.grads[v].assign(it->second.size(), 0.0);
    }
    std::mt19937_64 rng(seed);
    HardAssignment h;
    std::size_t violations = 0;
    double scale = 1.0 / static_cast<double>(sampleCount);
    for (std::size_t s = 0; s < sampleCount; ++s) {
        for (std::size_t i = 0; i < vars.size(); ++i) {
            h[vars[i]] = dists[i](rng);
        }
        if (hard_eval(e, h)) {
            continue;
        }
        ++violations;
        for (const auto& v : vars) {
            std::size_t val = h[v];
            out.grads[v][val] += scale / a.at(v)[val];
        }
    }
    out.loss = static_cast<double>(violations) * scale;
    return out;
}

PrimalDualStep primal_dual_step(LagrangeState& state, const std::map<std::string, double>& degrees) {
    PrimalDualStep out;
    for (const auto& [id, degree] : degrees) {
        if (!(degree >= 0.0 && degree <= 1.0)) {
            throw Error(ErrorCode::DataError, "constraint degree outside [0,1]", id);
        }
        double& lambda = state.multipliers[id];
        double violation = 1.0 - degree;
        out.weights[id] = lambda;
        out.augmentedLoss += lambda * violation;
        lambda = std::max(0.0, lambda + state.eta * violation);
    }
    return out;
}

MapResult constrained_map(const Assignments& a, const std::vector<Expr>& hard, std::size_t searchCap) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> logs;
    std::size_t space = 1;
    for (const auto& [name, probs] : a) {
        if (probs.empty()) {
            throw Error(ErrorCode::DataError, "empty prediction vector", name);
        }
        names.push_back(name);
        std::vector<double> l;
        for (double p : probs) {
            l.push_back(p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity());
        }
        logs.push_back(std::move(l));
        if (space > searchCap / probs.size()) {
            throw Error(ErrorCode::SearchSpaceTooLarge,
                    "joint assignment space exceeds the search cap of " + std::to_string(searchCap));
        }
        space *= probs.size();
    }
    for (const auto& e : hard) {
        for (const auto& v : variablesOf(e)) {
            if (!a.count(v)) {
                throw Error(ErrorCode::UnboundVariable, "constraint mentions an unpredicted concept", v);
            }
        }
    }

    MapResult out;
    bool found = false;
    std::vector<std::size_t> digits(names.size(), 0);
    HardAssignment h;
    for (const auto& n : names) {
        h[n] = 0;
    }
    for (std::size_t iter = 0; iter < space; ++iter) {
        double score = 0.0;
        for (std::size_t i = 0; i < names.size(); ++i) {
            score += logs[i][digits[i]];
        }
        if (!found || score > out.logProb) {
            bool ok = std::all_of(hard.begin(), hard.end(), [&](const Expr& e) { return hard_eval(e, h); });
            if (ok) {
                found = true;
                out.logProb = score;
                out.assignment = h;
            }
        }
        // Odometer with the last variable fastest, so visits are lexicographic.
        for (std::size_t i = names.size(); i-- > 0;) {
            if (++digits[i] < logs[i].size()) {
                h[names[i]] = digits[i];
                break;
            }
            digits[i] = 0;
            h[names[i]] = 0;
        }
    }
    if (!found) {
        out.infeasible = true;
        out.logProb = 0.0;
        for (std::size_t i = 0; i < names.size(); ++i) {
            std::size_t best = static_cast<std::size_t>(std::max_element(logs[i].begin(), logs[i].end()) - logs[i].begin());
            out.assignment[names[i]] = best;
            out.logProb += logs[i][best];
        }
    }
    return out;
}

}  // namespace nesy::constraints
