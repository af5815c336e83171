#pragma once

#include "nesy/provenance/proof.h"

#include <map>

namespace nesy::provenance {

inline constexpr std::size_t kMaxWmcVariables = 24;

/**
 * Probability with its gradient. `grad` holds the partial with respect to
 * every fact that occurs in some proof. For an annotated disjunction that
 * has at least one member in some proof, `rest` holds the partial shared by
 * each of its members that occurs in none.
 */
struct GradProb {
    double value = 0.0;
    std::map<FactId, double> grad;
    std::map<std::uint32_t, double> rest;

    /** d value / d p(f), zero for facts the proofs never touch. */
    double partial(FactId f, const FactWeights& weights) const;
};

/**
 * Exact probability that at least one proof is fully true. Enumerates joint
 * assignments of the involved variables: one Boolean per independent fact,
 * one categorical per annotated disjunction (its involved members plus an
 * "other" state carrying the remaining mass).
 */
double wmc(const ProofSet& proofs, const FactWeights& weights);
GradProb wmc_grad(const ProofSet& proofs, const FactWeights& weights);

/** Number of enumeration variables wmc would use. */
std::size_t wmcVariableCount(const ProofSet& proofs, const FactWeights& weights);

}  // namespace nesy::provenance
