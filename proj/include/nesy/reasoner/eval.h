#pragma once

#include "nesy/logic/validate.h"
#include "nesy/provenance/semiring.h"
#include "nesy/provenance/wmc.h"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nesy::reasoner {

using provenance::FactId;
using provenance::FactWeights;
using provenance::GradProb;
using provenance::SemiringSpec;
using provenance::Tag;

/** Probability vector per neural head id. */
using NeuralOutputs = std::map<std::string, std::vector<double>>;

struct TaggedRelation {
    std::map<Tuple, Tag> tuples;
};

struct EvalStats {
    std::size_t iterations = 0;
    std::size_t tuplesDerived = 0;
    double wallMs = 0.0;
};

class CompiledProgram;

/** Rules of a validated program prepared for evaluation; immutable and shareable. */
std::shared_ptr<const CompiledProgram> compile(logic::ValidatedProgram program);

const logic::ValidatedProgram& programOf(const CompiledProgram& compiled);

/**
 * Evaluation state for one program under one semiring. A context is
 * single-owner; any number of contexts may share one CompiledProgram.
 */
class EvalContext {
public:
    EvalContext(std::shared_ptr<const CompiledProgram> compiled, SemiringSpec spec);

    const logic::ValidatedProgram& program() const;
    const CompiledProgram& compiled() const {
        return *compiled_;
    }
    const SemiringSpec& semiring() const {
        return spec_;
    }
    const FactWeights& weights() const {
        return weights_;
    }
    const std::map<std::string, TaggedRelation>& relations() const {
        return relations_;
    }
    const TaggedRelation& relation(const std::string& name) const;
    const EvalStats& stats() const {
        return stats_;
    }
    bool seeded() const {
        return seeded_;
    }

    /** The probability slot that produced input fact f. */
    const logic::ProbSlot& slotOf(FactId f) const;

private:
    friend void seed_facts(EvalContext&, const NeuralOutputs&);
    friend void evaluate(EvalContext&);

    std::shared_ptr<const CompiledProgram> compiled_;
    SemiringSpec spec_;
    FactWeights weights_;
    std::map<std::string, TaggedRelation> base_;
    std::map<std::string, TaggedRelation> relations_;
    EvalStats stats_;
    bool seeded_ = false;
};

/**
 * Probability of every fact-group member: constants as written, neural slots
 * read from `outputs`. Checks and renormalization as for seed_facts.
 */
FactWeights bindWeights(const logic::Program& program, const NeuralOutputs& outputs);

/**
 * Binds every fact-group member to its probability and resets the relations
 * to the seeded input facts. A categorical group whose probabilities do not
 * sum to 1 within 1e-6 is renormalized.
 */
void seed_facts(EvalContext& ctx, const NeuralOutputs& outputs);

/** Runs the strata to a fixpoint, always starting from the seeded facts. */
void evaluate(EvalContext& ctx);

struct QueryResult {
    Tuple tuple;
    double probability = 0.0;
    std::optional<GradProb> grad;  // TopKProofsGrad only
};

/** Answers a declared query: matching tuples with non-zero probability, sorted by tuple. */
std::vector<QueryResult> query(const EvalContext& ctx, const std::string& queryName);

/**
 * Like query but for an arbitrary atom over a declared relation. With
 * includeZero, tuples whose probability is 0 are reported too (useful when
 * their gradient still matters).
 */
std::vector<QueryResult> queryAtom(const EvalContext& ctx, const logic::Atom& atom, bool includeZero = false);

/**
 * Adds scale * d(prob)/d(output) into headGrads for every neural slot,
 * allocating vectors sized like the seeded outputs.
 */
void accumulateHeadGradients(const EvalContext& ctx, const GradProb& grad, double scale,
        const NeuralOutputs& outputs, NeuralOutputs& headGrads);

/** One-call convenience: compile, seed, evaluate. */
EvalContext run(std::shared_ptr<const CompiledProgram> compiled, SemiringSpec spec, const NeuralOutputs& outputs = {});

}  // namespace nesy::reasoner
