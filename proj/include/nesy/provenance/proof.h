#pragma once

#include "nesy/provenance/fact.h"

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace nesy::provenance {

inline constexpr std::size_t kUnboundedK = std::numeric_limits<std::size_t>::max();

/** A conjunction of input facts; kept sorted and duplicate-free. */
struct Proof {
    std::vector<FactId> facts;

    friend auto operator<=>(const Proof&, const Proof&) = default;
};

/** Product of member probabilities, treating every fact as independent (a ranking heuristic). */
double proofProbability(const Proof& proof, const FactWeights& weights);

/**
 * Union of two proofs, or nullopt when the union would pick two different
 * members of one annotated disjunction.
 */
std::optional<Proof> joinProofs(const Proof& a, const Proof& b, const FactWeights& weights);

/**
 * A disjunction of proofs in canonical form: lexicographically sorted, no
 * duplicates, and no proof that is a strict superset of another.
 */
class ProofSet {
public:
    ProofSet() = default;

    /** Canonicalizes `proofs` (absorption) and keeps at most k of them. */
    static ProofSet from(std::vector<Proof> proofs, std::size_t k, const FactWeights& weights);
    static ProofSet single(FactId f);
    /** The set holding only the empty proof (certainly true). */
    static ProofSet certain();

    const std::vector<Proof>& proofs() const {
        return proofs_;
    }
    bool empty() const {
        return proofs_.empty();
    }
    std::size_t size() const {
        return proofs_.size();
    }
    /** Every distinct fact mentioned by some proof, sorted. */
    std::vector<FactId> facts() const;

    friend bool operator==(const ProofSet&, const ProofSet&) = default;

private:
    std::vector<Proof> proofs_;
};

/** Removes duplicates and strict supersets; result is lexicographically sorted. */
std::vector<Proof> absorb(std::vector<Proof> proofs);

/**
 * Keeps the k proofs of highest proofProbability; ties go to the
 * lexicographically smaller fact list. Input must be sorted; output stays sorted.
 */
std::vector<Proof> pruneTopK(std::vector<Proof> proofs, std::size_t k, const FactWeights& weights);

}  // namespace nesy::provenance
