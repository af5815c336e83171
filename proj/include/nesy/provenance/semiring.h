#pragma once

#include "nesy/provenance/proof.h"

#include <string>
#include <string_view>
#include <variant>

namespace nesy::provenance {

enum class SemiringKind { Boolean, MaxMin, AddMultProb, TopKProofs, TopKProofsGrad };

struct SemiringSpec {
    SemiringKind kind = SemiringKind::AddMultProb;
    std::size_t k = kUnboundedK;  // TopKProofs* only

    static SemiringSpec boolean() {
        return {SemiringKind::Boolean, kUnboundedK};
    }
    static SemiringSpec maxMin() {
        return {SemiringKind::MaxMin, kUnboundedK};
    }
    static SemiringSpec addMult() {
        return {SemiringKind::AddMultProb, kUnboundedK};
    }
    static SemiringSpec topK(std::size_t k) {
        return {SemiringKind::TopKProofs, k};
    }
    static SemiringSpec topKGrad(std::size_t k) {
        return {SemiringKind::TopKProofsGrad, k};
    }

    /**
     * Parses the CLI spelling: "bool", "maxmin", "addmult", "exact"
     * (gradient proofs with unbounded k), "topk:K" or "topkgrad:K".
     * Throws ConfigError on anything else, including k = 0.
     */
    static SemiringSpec parse(std::string_view text);

    bool proofBased() const {
        return kind == SemiringKind::TopKProofs || kind == SemiringKind::TopKProofsGrad;
    }
    std::string toString() const;

    friend bool operator==(const SemiringSpec&, const SemiringSpec&) = default;
};

/** Throws ConfigError unless k >= 1. */
void checkSpec(const SemiringSpec& spec);

/** bool for Boolean, double for MaxMin/AddMultProb, ProofSet for the proof semirings. */
using Tag = std::variant<bool, double, ProofSet>;

Tag sr_zero(const SemiringSpec& spec);
Tag sr_one(const SemiringSpec& spec);
Tag sr_add(const SemiringSpec& spec, const Tag& a, const Tag& b, const FactWeights& weights);
Tag sr_mul(const SemiringSpec& spec, const Tag& a, const Tag& b, const FactWeights& weights);

/**
 * ⊕ of all tags. Proof sets are merged in one step, so the result does not
 * depend on the order of `tags` even when pruning is active.
 */
Tag sr_sum(const SemiringSpec& spec, const std::vector<Tag>& tags, const FactWeights& weights);

/** Tag of input fact f: p > 0.5 (Boolean), p (scalars), {{f}} (proofs). */
Tag sr_fact(const SemiringSpec& spec, FactId f, const FactWeights& weights);

/** Canonical equality; scalar tags compare within 1e-12. */
bool sr_equal(const SemiringSpec& spec, const Tag& a, const Tag& b);
bool sr_is_zero(const SemiringSpec& spec, const Tag& t);

/** Probability carried by a tag: 0/1, the scalar itself, or wmc of the proofs. */
double sr_probability(const Tag& t, const FactWeights& weights);

std::string tagToString(const Tag& t);

}  // namespace nesy::provenance
