#pragma once

#include "nesy/constraints/expr.h"

namespace nesy::constraints {

/**
 * Product t-norm degree in [0,1]: leaf = its probability, andL = product,
 * orL / existsL = 1 - prod(1 - c), notL = 1 - c, ifL(a, b) = 1 if a <= b
 * else b / a, exactL = 1 when structural, else 1 - |sum - 1| clamped.
 * Throws UnboundVariable, TypeMismatch.
 */
double soft_eval(const Expr& e, const Assignments& a);

struct SoftLoss {
    double loss = 0.0;
    /** d loss / d probability, shaped like the assignments of the mentioned variables. */
    Assignments grads;
};

/** loss = 1 - soft_eval, with exact partials; flat side taken at the ifL and exactL kinks. */
SoftLoss soft_loss_grad(const Expr& e, const Assignments& a);

/** Classical evaluation (exactL: exactly one child true). */
bool hard_eval(const Expr& e, const HardAssignment& h);

/**
 * Monte-Carlo violation rate of hard semantics under independent sampling
 * of every mentioned variable, with the score-function gradient
 * mean(violated * d log p(sample) / d p).
 */
SoftLoss sampling_loss(const Expr& e, const Assignments& a, std::size_t sampleCount, std::uint64_t seed);

/** Lagrange multipliers per constraint id. */
struct LagrangeState {
    std::map<std::string, double> multipliers;
    double eta = 0.01;
};

struct PrimalDualStep {
    /** sum over constraints of lambda * (1 - degree), with the multipliers before the update. */
    double augmentedLoss = 0.0;
    /** Coefficient of each constraint's soft loss (1 - degree) in the primal objective. */
    std::map<std::string, double> weights;
};

/** Then lambda <- max(0, lambda + eta * (1 - degree)). Throws DataError for a degree outside [0,1]. */
PrimalDualStep primal_dual_step(LagrangeState& state, const std::map<std::string, double>& degrees);

inline constexpr std::size_t kDefaultSearchCap = 1'000'000;

struct MapResult {
    HardAssignment assignment;
    double logProb = 0.0;
    bool infeasible = false;
};

/**
 * Exhaustive constrained MAP over the variables of `a`: maximizes the sum of
 * log probabilities among assignments satisfying every constraint, ties to
 * the lexicographically smallest (variables in name order). With no
 * satisfying assignment returns the per-variable argmax flagged infeasible.
 * Throws SearchSpaceTooLarge when the joint space exceeds searchCap.
 */
MapResult constrained_map(const Assignments& a, const std::vector<Expr>& hard, std::size_t searchCap = kDefaultSearchCap);

}  // namespace nesy::constraints
