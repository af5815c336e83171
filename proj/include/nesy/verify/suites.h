#pragma once

#include "nesy/provenance/semiring.h"
#include "nesy/provenance/wmc.h"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

namespace nesy::verify {

/** Outcome of one randomized check suite. */
struct SuiteResult {
    explicit SuiteResult(std::string suiteName = {}) : name(std::move(suiteName)) {}

    std::string name;
    std::size_t instances = 0;
    std::size_t failures = 0;
    /** Instances excluded by the suite's own rule (e.g. infeasible constraint sets). */
    std::size_t excluded = 0;
    /** Largest observed error (relative for gradient checks, absolute otherwise). */
    double maxError = 0.0;
    double seconds = 0.0;
    std::string firstFailure;

    bool passed() const {
        return failures == 0 && instances > 0;
    }
    void fail(std::string what);
};

/** |a - n| / max(|a|, |n|, 1e-3). */
double relativeError(double analytic, double numeric);

inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kGradientTolerance = 1e-4;

/**
 * Reasoner under TopKProofs(k = unbounded) against exhaustive world
 * enumeration, per query tuple, on random programs.
 */
SuiteResult oracleProbabilities(std::size_t programs, std::uint64_t seed, double tolerance = 1e-9);

/** Same programs, TopKProofsGrad(k = unbounded) gradients against enumerate_grad. */
SuiteResult oracleGradients(std::size_t programs, std::uint64_t seed, double tolerance = 1e-9);

/** Boolean semiring against the naive stratified evaluator, negation enabled. */
SuiteResult booleanSemantics(std::size_t programs, std::uint64_t seed);

/**
 * Associativity, commutativity, identities and annihilation over random
 * triples, compared exactly. Scalar values are dyadic so that every law is
 * exact in floating point; proof semirings use k = 64, above any instance's
 * proof count.
 */
SuiteResult semiringLaws(const provenance::SemiringSpec& spec, std::size_t triples, std::uint64_t seed);

using WmcGradFn = std::function<provenance::GradProb(const provenance::ProofSet&, const provenance::FactWeights&)>;

/** Central finite differences of wmc against `grad` on random instances with at most 10 facts. */
SuiteResult wmcGradients(std::size_t instances, std::uint64_t seed, const WmcGradFn& grad = provenance::wmc_grad);

/**
 * Central finite differences of random MLPs (Linear/ReLU/Softmax, batched)
 * against backward, for every parameter and input. Instances with a ReLU
 * input within 1e-3 of its kink are redrawn.
 */
SuiteResult networkGradients(std::size_t instances, std::uint64_t seed);

/**
 * Central finite differences of the soft constraint loss on random
 * expressions. Instances within 1e-4 of an ifL or exactL kink are redrawn
 * and counted in `excluded`.
 */
SuiteResult softLossGradients(std::size_t instances, std::uint64_t seed);

/**
 * constrained_map on random variables and hard constraints: every feasible
 * answer must satisfy every constraint; infeasible instances are counted
 * in `excluded`.
 */
SuiteResult mapCompliance(std::size_t instances, std::uint64_t seed);

/**
 * Every .nsl file in `dir`, whose first line is `// expect: OK` or
 * `// expect: <ErrorCode> <line>:<col>`. Valid programs must validate, dump
 * to the sibling .ast file and survive printProgram -> parse unchanged;
 * invalid ones must fail tokenize/parse/validate with that code and position.
 */
SuiteResult parserCorpus(const std::filesystem::path& dir);

}  // namespace nesy::verify
