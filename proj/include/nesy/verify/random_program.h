#pragma once

#include "nesy/logic/validate.h"

#include <cstdint>
#include <string>

namespace nesy::verify {

struct RandomProgramOptions {
    std::size_t maxVariables = 10;
    std::size_t maxRules = 5;
    bool allowNegation = false;
    bool allowDisjunctions = true;
};

struct RandomProgram {
    std::string source;
    logic::ValidatedProgram program;
    /** Query over a derived relation; also declared as the program's query. */
    logic::Atom query;
};

/**
 * A small random program over domain {1, 2, 3}: probabilistic base relations
 * e/2 and a/1, a categorical c/1, certain n/1, and up to maxRules rules over
 * derived p/2, q/1, r/1 (recursion allowed). Negation, when enabled, only
 * targets the certain relation n. Deterministic in `seed`.
 */
RandomProgram randomProgram(std::uint64_t seed, const RandomProgramOptions& options = {});

}  // namespace nesy::verify
