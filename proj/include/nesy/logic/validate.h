#pragma once

#include "nesy/logic/ast.h"

#include <map>
#include <set>
#include <string>

namespace nesy::logic {

/**
 * A program that passed every static check, annotated with the stratum of
 * each relation. Relations in stratum s only depend negatively on relations
 * in strata < s.
 */
struct ValidatedProgram {
    Program program;
    std::map<std::string, int> strata;
    int stratumCount = 0;
    /** Relations whose tuples can carry uncertainty (fact groups, transitively). */
    std::set<std::string> probabilistic;

    const RelationDecl& relation(const std::string& name) const;
    const QueryDecl& query(const std::string& name) const;
};

/**
 * Static checks, in this order: relation declarations (DuplicateRelation),
 * atom references (UnknownRelation, ArityMismatch, TypeMismatch), fact lines
 * (NonGroundFact, MixedFactGroup, InvalidProbability), queries
 * (DuplicateQuery), stratification (UnstratifiableNegation), rule safety
 * (RangeRestrictionViolation, UnboundGuardVariable) and finally the ban on
 * negating relations that depend on probabilistic facts
 * (ProbabilisticNegation).
 *
 * Safety: a variable is bound by a positive body atom, or by an equality
 * guard `V == expr` (either side) whose other side is fully bound; head,
 * negated-atom and guard variables must all be bound.
 */
ValidatedProgram validate(const Program& program);

}  // namespace nesy::logic
