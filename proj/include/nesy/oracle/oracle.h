#pragma once

#include "nesy/logic/validate.h"
#include "nesy/provenance/wmc.h"

#include <map>
#include <set>
#include <string>

namespace nesy::oracle {

using provenance::FactId;
using provenance::FactWeights;
using provenance::GradProb;

inline constexpr std::size_t kMaxOracleVariables = 20;

/** One possible world: a truth value per independent fact, one chosen member per disjunction. */
struct WorldAssignment {
    std::map<FactId, bool> independentChoices;
    std::map<std::uint32_t, std::uint32_t> nadChoices;
};

/** Relation name -> set of true tuples. */
using BooleanModel = std::map<std::string, std::set<Tuple>>;

/**
 * Classical stratified Datalog fixpoint by naive iteration. `inputs` are the
 * extensional tuples in addition to the program's body-less rules; fact
 * groups are ignored.
 */
BooleanModel evaluateBoolean(const logic::ValidatedProgram& program, const BooleanModel& inputs);

/** Input tuples that hold in a world (fact-group members only). */
BooleanModel worldFacts(const logic::Program& program, const WorldAssignment& world);

/** Every world of the program with its weight, in a fixed order. Throws TooManyWorlds. */
std::vector<std::pair<WorldAssignment, double>> enumerateWorlds(const logic::Program& program,
        const FactWeights& weights);

/** Probability that some tuple matching `query` is derivable. Throws TooManyWorlds. */
double enumerate_prob(const logic::ValidatedProgram& program, const FactWeights& weights, const logic::Atom& query);

/** Probability of every derivable tuple matching `query`; tuples of probability 0 are omitted. */
std::map<Tuple, double> enumerate_all(const logic::ValidatedProgram& program, const FactWeights& weights,
        const logic::Atom& query);

/**
 * Exact partial derivatives of enumerate_prob with respect to every fact
 * probability (independent: P(q | f) - P(q | not f); disjunction member:
 * derivative holding its siblings fixed). Every fact of the program gets a key.
 */
GradProb enumerate_grad(const logic::ValidatedProgram& program, const FactWeights& weights,
        const logic::Atom& query);

/** Number of enumeration variables: independent facts plus disjunction groups. */
std::size_t variableCount(const logic::Program& program);

}  // namespace nesy::oracle
