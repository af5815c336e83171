#pragma once

#include "nesy/constraints/constraints.h"
#include "nesy/neural/network.h"
#include "nesy/neural/train.h"
#include "nesy/provenance/semiring.h"
#include "nesy/reasoner/eval.h"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace nesy::tasks {

enum class TaskId { MnistSum, Shapes, ToyNer, MathInference };
enum class Interplay { Reasoner, SoftConstraint, Sampling, PrimalDual };

std::string taskName(TaskId t);
/** "mnist-sum" (also "mnist"), "shapes", "toy-ner" ("ner"), "math" ("math-inference"); ConfigError otherwise. */
TaskId parseTask(const std::string& s);
std::string interplayName(Interplay m);
/** "reasoner", "soft-constraint", "sampling", "primal-dual"; ConfigError otherwise. */
Interplay parseInterplay(const std::string& s);

class HeadSet;

struct RunConfig {
    TaskId task = TaskId::MnistSum;
    provenance::SemiringSpec semiring = provenance::SemiringSpec::topKGrad(3);
    Interplay interplay = Interplay::Reasoner;
    std::size_t epochs = 5;
    std::size_t batchSize = 16;
    double lr = 1e-3;
    std::uint64_t seed = 1;
    /** Dataset directory; empty means generate in memory from `seed`. */
    std::filesystem::path dataDir;
    std::filesystem::path outDir = "out";
    std::size_t trainCount = 2000;
    std::size_t testCount = 500;
    /** Dual step size for primal-dual training. */
    double eta = 0.01;
    /** Samples per example for the sampling loss. */
    std::size_t samples = 64;
    /** Toy NER: supervise only the first query (single-query mode). */
    bool conjunctionOnly = false;
    /** Directory of <head>.nsyn checkpoints that replace the fresh initialization. */
    std::filesystem::path checkpointDir;
    /** Skip training and only evaluate (normally with checkpointDir). */
    bool evaluateOnly = false;
    /** Called with the accumulated gradients just before every optimizer step. */
    std::function<void(const HeadSet&)> beforeStep;

    /** Per-task defaults. */
    static RunConfig defaults(TaskId task);
    /** Throws ConfigError on non-positive numbers or an interplay the task does not support. */
    void validate() const;
    std::size_t trainingEpochs() const {
        return evaluateOnly ? 0 : epochs;
    }
};

/** Named metric values plus per-sample timings. */
struct Metrics {
    std::map<std::string, double> values;
    double trainMsPerSample = 0.0;
    double testMsPerSample = 0.0;
    std::vector<double> epochLoss;
    std::map<std::string, double> lambdas;
};

struct TaskResult {
    Metrics metrics;
    std::vector<neural::Network> heads;
};

/** Networks of one task with their optimizers. */
class HeadSet {
public:
    std::size_t add(neural::Network net, const neural::OptimizerSpec& opt);

    neural::Network& net(std::size_t i) {
        return nets_.at(i);
    }
    const neural::Network& net(std::size_t i) const {
        return nets_.at(i);
    }
    std::size_t size() const {
        return nets_.size();
    }
    void zeroGrads();
    void step();
    /** Loads <checkpointDir>/<head>.nsyn over every net when a directory is configured. */
    void adopt(const RunConfig& config);
    /** config.beforeStep, then step. */
    void step(const RunConfig& config);
    std::vector<neural::Network> release() {
        return std::move(nets_);
    }

private:
    std::vector<neural::Network> nets_;
    std::vector<neural::Optimizer> opts_;
};

/** One application of a network to one input, publishing its output under headId. */
struct HeadCall {
    std::size_t net = 0;
    std::string headId;
    std::vector<double> input;
};

/** Runs every call, batching calls that share a network; caches for backward when `train`. */
reasoner::NeuralOutputs forwardCalls(HeadSet& heads, const std::vector<HeadCall>& calls, bool train);

/** Backpropagates d loss / d output per head id through the calls of the last forwardCalls. */
void backwardCalls(HeadSet& heads, const std::vector<HeadCall>& calls, const reasoner::NeuralOutputs& grads);

struct AnswerLoss {
    double loss = 0.0;
    /** d loss / d P(answer). */
    std::vector<double> grad;
};

/** -ln(P[target] / sum P), floored like nll_loss. */
AnswerLoss normalizedNll(const std::vector<double>& p, std::size_t target);

/** Binary cross-entropy of P(yes) = p against `yes`; grad has one entry, d loss / dp. */
AnswerLoss binaryNll(double p, bool yes);

/** A reusable evaluation context for one compiled program. */
class ReasonerSession {
public:
    ReasonerSession(const std::string& source, const provenance::SemiringSpec& spec);

    /** Seeds, evaluates and answers `atom`, including tuples of probability 0. */
    std::vector<reasoner::QueryResult> ask(const reasoner::NeuralOutputs& outputs, const logic::Atom& atom);
    /** Adds scale * d P / d output into grads. */
    void addGradient(const provenance::GradProb& g, double scale, const reasoner::NeuralOutputs& outputs,
            reasoner::NeuralOutputs& grads) const;
    const logic::ValidatedProgram& program() const;
    const logic::Atom& queryAtom(const std::string& name) const;
    double reasoningMs() const {
        return reasoningMs_;
    }
    void resetClock() {
        reasoningMs_ = 0.0;
    }

private:
    reasoner::EvalContext ctx_;
    double reasoningMs_ = 0.0;
};

/** Adds scale * g into acc, sizing entries on first use. */
void addInto(reasoner::NeuralOutputs& acc, const reasoner::NeuralOutputs& g, double scale = 1.0);

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

/** Milliseconds per sample, 0 when nothing ran. */
double perSample(double ms, std::size_t samples);

/** Deterministic shuffled order 0..n-1 for one epoch. */
std::vector<std::size_t> epochOrder(std::size_t n, std::uint64_t seed, std::size_t epoch);

/** Dispatches to the task's runner. */
TaskResult runTask(const RunConfig& config);

}  // namespace nesy::tasks
