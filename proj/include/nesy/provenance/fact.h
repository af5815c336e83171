#pragma once

#include "nesy/logic/ast.h"

#include <compare>
#include <cstdint>
#include <ostream>
#include <vector>

namespace nesy::provenance {

/** Names an input fact: member `member` of fact group `group` in the program. */
struct FactId {
    std::uint32_t group = 0;
    std::uint32_t member = 0;

    friend auto operator<=>(const FactId&, const FactId&) = default;
};

std::ostream& operator<<(std::ostream& os, FactId f);

struct GroupWeights {
    logic::FactGroupKind kind = logic::FactGroupKind::Independent;
    std::vector<double> probs;
};

/**
 * Probability of every input fact, organized like Program::factGroups.
 * Members of an Independent group are independent Bernoulli variables;
 * members of a CategoricalAD group are mutually exclusive.
 */
struct FactWeights {
    std::vector<GroupWeights> groups;

    double prob(FactId f) const {
        return groups.at(f.group).probs.at(f.member);
    }
    bool isCategorical(std::uint32_t group) const {
        return groups.at(group).kind == logic::FactGroupKind::CategoricalAD;
    }
    /** True when a and b are different members of one annotated disjunction. */
    bool exclusive(FactId a, FactId b) const {
        return a.group == b.group && a.member != b.member && isCategorical(a.group);
    }
    bool contains(FactId f) const {
        return f.group < groups.size() && f.member < groups[f.group].probs.size();
    }
};

}  // namespace nesy::provenance
