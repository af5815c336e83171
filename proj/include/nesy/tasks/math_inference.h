#pragma once

#include "nesy/tasks/common.h"

#include <array>
#include <filesystem>

namespace nesy::tasks {

inline constexpr std::size_t kMathListSize = 6;
using MathList = std::array<double, kMathListSize>;

/** Sum of the elements exceeds zero. */
bool mathProp1(const MathList& l);
/** Sum of the absolute values exceeds 0.5. */
bool mathProp2(const MathList& l);
/** First elements share a sign. */
bool mathRel1(const MathList& l1, const MathList& l2);
/** Last elements have opposite signs. */
bool mathRel2(const MathList& l1, const MathList& l2);

struct MathSample {
    MathList l1{};
    MathList l2{};
    /** Property applied to L1 and L2 (1 or 2) and relation (1 or 2). */
    int propA = 1;
    int propB = 1;
    int relation = 1;
    bool label = false;
};

/** Lists uniform in [-1, 1]; property and relation indices uniform. */
std::vector<MathSample> gen_math(std::uint64_t seed, std::size_t count);

inline constexpr const char* kMathRecords = "math.jsonl";

struct MathData {
    std::vector<MathSample> train;
    std::vector<MathSample> test;
};

/** One JSON record per sample: id, split, l1, l2, prop_a, prop_b, relation, label. */
std::vector<std::filesystem::path> writeMath(const MathData& data, const std::filesystem::path& dir);
/** Throws IoError, DataError. */
MathData readMath(const std::filesystem::path& dir);

/** inference() :- pa(), pb(), r(), over heads pa, pb, r (output 1 = holds). */
std::string mathProgram();
constraints::Expr mathConstraint();

/** Nets 0,1 are the property heads, 2,3 the relation heads. */
std::vector<HeadCall> mathCalls(const MathSample& s);

/**
 * Data from config.dataDir when set, else generated (test split from seed + 7919).
 * Trains the four heads from the conjunction label only and reports
 * global_acc, property_acc and relation_acc (every head on every test
 * sample against the recomputed ground truth).
 */
TaskResult run_math_inference(const RunConfig& config);

}  // namespace nesy::tasks
