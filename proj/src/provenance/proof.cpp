#include "nesy/provenance/proof.h"

#include <algorithm>

namespace nesy::provenance {

std::ostream& operator<<(std::ostream& os, FactId f) {
    return os << "f" << f.group << "." << f.member;
}

double proofProbability(const Proof& proof, const FactWeights& weights) {
    double p = 1.0;
    for (FactId f : proof.facts) {
        p *= weights.prob(f);
    }
    return p;
}

std::optional<Proof> joinProofs(const Proof& a, const Proof& b, const FactWeights& weights) {
    Proof out;
    out.facts.reserve(a.facts.size() + b.facts.size());
    std::set_union(a.facts.begin(), a.facts.end(), b.facts.begin(), b.facts.end(), std::back_inserter(out.facts));
    // Sorted by (group, member): members of one group are adjacent.
    for (std::size_t i = 1; i < out.facts.size(); ++i) {
        if (weights.exclusive(out.facts[i - 1], out.facts[i])) {
            return std::nullopt;
        }
    }
    return out;
}

std::vector<Proof> absorb(std::vector<Proof> proofs) {
    std::sort(proofs.begin(), proofs.end(), [](const Proof& a, const Proof& b) {
        if (a.facts.size() != b.facts.size()) {
            return a.facts.size() < b.facts.size();
        }
        return a < b;
    });
    std::vector<Proof> kept;
    kept.reserve(proofs.size());
    for (auto& p : proofs) {
        bool subsumed = std::any_of(kept.begin(), kept.end(), [&](const Proof& k) {
            return std::includes(p.facts.begin(), p.facts.end(), k.facts.begin(), k.facts.end());
        });
        if (!subsumed) {
            kept.push_back(std::move(p));
        }
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::vector<Proof> pruneTopK(std::vector<Proof> proofs, std::size_t k, const FactWeights& weights) {
    if (proofs.size() <= k) {
        return proofs;
    }
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(proofs.size());
    for (std::size_t i = 0; i < proofs.size(); ++i) {
        ranked.emplace_back(proofProbability(proofs[i], weights), i);
    }
    // Input is lexicographically sorted, so the index breaks ties lexicographically.
    std::stable_sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<std::size_t> keep;
    keep.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        keep.push_back(ranked[i].second);
    }
    std::sort(keep.begin(), keep.end());
    std::vector<Proof> out;
    out.reserve(k);
    for (std::size_t i : keep) {
        out.push_back(std::move(proofs[i]));
    }
    return out;
}

ProofSet ProofSet::from(std::vector<Proof> proofs, std::size_t k, const FactWeights& weights) {
    ProofSet s;
    s.proofs_ = pruneTopK(absorb(std::move(proofs)), k, weights);
    return s;
}

ProofSet ProofSet::single(FactId f) {
    ProofSet s;
    s.proofs_.push_back(Proof{{f}});
    return s;
}

ProofSet ProofSet::certain() {
    ProofSet s;
    s.proofs_.push_back(Proof{});
    return s;
}

std::vector<FactId> ProofSet::facts() const {
    std::vector<FactId> out;
    for (const auto& p : proofs_) {
        out.insert(out.end(), p.facts.begin(), p.facts.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace nesy::provenance
