#pragma once

#include "nesy/tasks/common.h"

#include <array>
#include <filesystem>

namespace nesy::tasks {

inline constexpr std::size_t kNerDim = 16;

/** Three person and three location embeddings with the hidden concepts that label them. */
struct NerSample {
    std::array<std::vector<double>, 3> persons;
    std::array<std::vector<double>, 3> locations;
    std::array<bool, 3> isRealPerson{};
    std::array<bool, 3> worksIn{};
    bool constraint1 = false;
    bool constraint2 = false;
};

/** P1 & W1 & P2 & W2. */
bool nerConstraint1(const std::array<bool, 3>& p, const std::array<bool, 3>& w);
/** (P2 & W2) | (P3 & W3). */
bool nerConstraint2(const std::array<bool, 3>& p, const std::array<bool, 3>& w);

struct NerData {
    std::vector<NerSample> train;
    std::vector<NerSample> test;
};

/**
 * Concepts are Bernoulli(0.8); embeddings are Gaussian (sigma 1) around
 * class means that differ by 2 sigma in every coordinate, with sign
 * patterns drawn from the seed. works_in[i] shapes location i.
 */
NerData gen_toy_ner(std::uint64_t seed, std::size_t trainCount, std::size_t testCount);

inline constexpr const char* kNerRecords = "ner.jsonl";

/** One JSON record per sample: id, split, persons, locations, is_real_person, works_in, constraint1, constraint2. */
std::vector<std::filesystem::path> writeNer(const NerData& data, const std::filesystem::path& dir);
/** Throws IoError, DataError. */
NerData readNer(const std::filesystem::path& dir);

/** Heads person_i and works_i (output 1 = true) feeding queries c1() and c2(). */
std::string nerProgram();
constraints::Expr nerConstraint1Expr();
constraints::Expr nerConstraint2Expr();

/** Head calls of one sample: person net on P_i, works net on concat(P_i, L_i). */
std::vector<HeadCall> nerCalls(const NerSample& s);

/** P(c1), P(c2) through the reasoner. */
std::pair<double, double> nerQueryProbabilities(ReasonerSession& session, const reasoner::NeuralOutputs& outputs);

/**
 * Data from config.dataDir when set, else generated from the seed.
 * Trains is_real_person and works_in from the two query labels (or the
 * first only, in conjunction-only mode) and reports constraint1_acc,
 * constraint2_acc, concept_acc and violation_rate (argmax concepts that
 * contradict a label).
 */
TaskResult run_toy_ner(const RunConfig& config);

}  // namespace nesy::tasks
