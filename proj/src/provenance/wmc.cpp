#include "nesy/provenance/wmc.h"

#include "nesy/error.h"

#include <algorithm>
#include <set>

namespace nesy::provenance {

double GradProb::partial(FactId f, const FactWeights& weights) const {
    if (auto it = grad.find(f); it != grad.end()) {
        return it->second;
    }
    if (weights.isCategorical(f.group)) {
        if (auto it = rest.find(f.group); it != rest.end()) {
            return it->second;
        }
    }
    return 0.0;
}

namespace {

struct Variable {
    std::uint32_t group = 0;
    bool categorical = false;
    std::vector<std::uint32_t> members;  // categorical: involved members, in state order
    bool hasOther = false;               // categorical: last state is "some other member"
    std::vector<double> stateProbs;
};

struct Requirement {
    std::uint32_t var;
    std::uint32_t state;
};

class Enumeration {
public:
    Enumeration(const ProofSet& proofs, const FactWeights& weights) {
        std::map<std::uint32_t, std::size_t> groupVar;
        std::map<FactId, std::size_t> factVar;
        for (FactId f : proofs.facts()) {
            if (weights.isCategorical(f.group)) {
                auto [it, fresh] = groupVar.emplace(f.group, vars_.size());
                if (fresh) {
                    vars_.push_back(Variable{f.group, true, {}, false, {}});
                }
                vars_[it->second].members.push_back(f.member);
            } else {
                factVar.emplace(f, vars_.size());
                double p = weights.prob(f);
                vars_.push_back(Variable{f.group, false, {f.member}, false, {1.0 - p, p}});
            }
        }
        if (vars_.size() > kMaxWmcVariables) {
            throw Error(ErrorCode::TooManyFacts,
                    "proofs involve " + std::to_string(vars_.size()) + " variables, limit is " +
                            std::to_string(kMaxWmcVariables));
        }
        for (auto& v : vars_) {
            if (!v.categorical) {
                continue;
            }
            const auto& probs = weights.groups.at(v.group).probs;
            double other = 0.0;
            for (std::uint32_t m = 0; m < probs.size(); ++m) {
                if (!std::binary_search(v.members.begin(), v.members.end(), m)) {
                    other += probs[m];
                    v.hasOther = true;
                }
            }
            for (std::uint32_t m : v.members) {
                v.stateProbs.push_back(probs[m]);
            }
            if (v.hasOther) {
                v.stateProbs.push_back(other);
            }
        }
        for (const auto& proof : proofs.proofs()) {
            std::vector<Requirement> req;
            for (FactId f : proof.facts) {
                if (weights.isCategorical(f.group)) {
                    std::size_t vi = groupVar.at(f.group);
                    const auto& ms = vars_[vi].members;
                    auto state = static_cast<std::uint32_t>(std::lower_bound(ms.begin(), ms.end(), f.member) - ms.begin());
                    req.push_back({static_cast<std::uint32_t>(vi), state});
                } else {
                    req.push_back({static_cast<std::uint32_t>(factVar.at(f)), 1});
                }
            }
            requirements_.push_back(std::move(req));
        }
    }

    GradProb run(bool withGrad) const {
        const std::size_t n = vars_.size();
        std::vector<std::uint32_t> state(n, 0);
        std::vector<double> prefix(n + 1, 1.0);
        std::vector<double> suffix(n + 1, 1.0);
        std::vector<std::vector<double>> dState(n);
        if (withGrad) {
            for (std::size_t i = 0; i < n; ++i) {
                dState[i].assign(vars_[i].stateProbs.size(), 0.0);
            }
        }
        double value = 0.0;
        while (true) {
            if (satisfied(state)) {
                for (std::size_t i = 0; i < n; ++i) {
                    prefix[i + 1] = prefix[i] * vars_[i].stateProbs[state[i]];
                }
                value += prefix[n];
                if (withGrad) {
                    for (std::size_t i = n; i-- > 0;) {
                        suffix[i] = suffix[i + 1] * vars_[i].stateProbs[state[i]];
                    }
                    for (std::size_t i = 0; i < n; ++i) {
                        dState[i][state[i]] += prefix[i] * suffix[i + 1];
                    }
                }
            }
            std::size_t i = 0;
            for (; i < n; ++i) {
                if (++state[i] < vars_[i].stateProbs.size()) {
                    break;
                }
                state[i] = 0;
            }
            if (i == n) {
                break;
            }
        }

        GradProb out;
        // Repair rounding only; larger excursions (unnormalized weights) are real values.
        if (value > 1.0 && value <= 1.0 + 1e-9) {
            value = 1.0;
        } else if (value < 0.0 && value >= -1e-9) {
            value = 0.0;
        }
        out.value = value;
        if (!withGrad) {
            return out;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const Variable& v = vars_[i];
            if (!v.categorical) {
                out.grad[FactId{v.group, v.members[0]}] = dState[i][1] - dState[i][0];
                continue;
            }
            for (std::size_t s = 0; s < v.members.size(); ++s) {
                out.grad[FactId{v.group, v.members[s]}] = dState[i][s];
            }
            if (v.hasOther) {
                out.rest[v.group] = dState[i].back();
            }
        }
        return out;
    }

private:
    bool satisfied(const std::vector<std::uint32_t>& state) const {
        for (const auto& req : requirements_) {
            bool all = true;
            for (const auto& r : req) {
                if (state[r.var] != r.state) {
                    all = false;
                    break;
                }
            }
            if (all) {
                return true;
            }
        }
        return false;
    }

    std::vector<Variable> vars_;
    std::vector<std::vector<Requirement>> requirements_;
};

}  // namespace

double wmc(const ProofSet& proofs, const FactWeights& weights) {
    if (proofs.empty()) {
        return 0.0;
    }
    return Enumeration(proofs, weights).run(false).value;
}

GradProb wmc_grad(const ProofSet& proofs, const FactWeights& weights) {
    if (proofs.empty()) {
        return {};
    }
    return Enumeration(proofs, weights).run(true);
}

std::size_t wmcVariableCount(const ProofSet& proofs, const FactWeights& weights) {
    std::set<std::uint32_t> groups;
    std::size_t count = 0;
    for (FactId f : proofs.facts()) {
        if (!weights.isCategorical(f.group)) {
            ++count;
        } else if (groups.insert(f.group).second) {
            ++count;
        }
    }
    return count;
}

}  // namespace nesy::provenance
