#pragma once

#include "nesy/tasks/common.h"
#include "nesy/tasks/digits.h"

#include <filesystem>

namespace nesy::tasks {

/** Two digit images, one shared classifier applied to each. */
std::string mnistSumProgram();

/** Consecutive digits (2i, 2i+1) form pair i; labels are their sum. */
struct MnistPairs {
    DigitSet digits;

    std::size_t size() const {
        return digits.size() / 2;
    }
    int digitA(std::size_t i) const {
        return digits.labels[2 * i];
    }
    int digitB(std::size_t i) const {
        return digits.labels[2 * i + 1];
    }
    int sum(std::size_t i) const {
        return digitA(i) + digitB(i);
    }
};

struct MnistData {
    MnistPairs train;
    MnistPairs test;
};

inline constexpr const char* kMnistTrainImages = "train-images-idx3-ubyte";
inline constexpr const char* kMnistTrainLabels = "train-labels-idx1-ubyte";
inline constexpr const char* kMnistTestImages = "t10k-images-idx3-ubyte";
inline constexpr const char* kMnistTestLabels = "t10k-labels-idx1-ubyte";

/**
 * IDX files from config.dataDir when set (standard MNIST file names),
 * otherwise synthetic digits from config.seed. Uses 2 * trainCount and
 * 2 * testCount digits. Throws DataError when the files hold too few.
 */
MnistData loadMnistData(const RunConfig& config);

/** Reads a labeled digit set from an images/labels IDX pair. */
DigitSet readIdxDigits(const std::filesystem::path& images, const std::filesystem::path& labels);

/** Constraint "the two digits sum to s" over heads img_a and img_b. */
constraints::Expr sumConstraint(int s);

/** P(sum2(s)) for s = 0..18 from a session over mnistSumProgram. */
std::vector<double> sumDistribution(ReasonerSession& session, const reasoner::NeuralOutputs& outputs);

/**
 * Trains the shared digit head from sum labels only and reports
 * sum_accuracy, digit_accuracy (hidden labels, eval only),
 * constrained_consistency and constrained_digit_accuracy (MAP decoding
 * given the true sum), and reasoning time per test sample.
 */
TaskResult run_mnist_sum(const RunConfig& config);

/** Evaluates a digit head on test pairs (same metrics, no training). */
Metrics evaluate_mnist_sum(const RunConfig& config, const neural::Network& head, const MnistPairs& test);

}  // namespace nesy::tasks
