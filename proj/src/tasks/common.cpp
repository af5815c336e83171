#include "nesy/tasks/common.h"

#include "nesy/error.h"
#include "nesy/logic/parser.h"
#include "nesy/tasks/math_inference.h"
#include "nesy/tasks/mnist_sum.h"
#include "nesy/tasks/shapes.h"
#include "nesy/tasks/toy_ner.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace nesy::tasks {

std::string taskName(TaskId t) {
    switch (t) {
    case TaskId::MnistSum:
        return "mnist-sum";
    case TaskId::Shapes:
        return "shapes";
    case TaskId::ToyNer:
        return "toy-ner";
    case TaskId::MathInference:
        return "math";
    }
    return "?";
}

TaskId parseTask(const std::string& s) {
    if (s == "mnist-sum" || s == "mnist") {
        return TaskId::MnistSum;
    }
    if (s == "shapes") {
        return TaskId::Shapes;
    }
    if (s == "toy-ner" || s == "ner") {
        return TaskId::ToyNer;
    }
    if (s == "math" || s == "math-inference") {
        return TaskId::MathInference;
    }
    throw Error(ErrorCode::ConfigError, "unknown task '" + s + "'", s);
}

std::string interplayName(Interplay m) {
    switch (m) {
    case Interplay::Reasoner:
        return "reasoner";
    case Interplay::SoftConstraint:
        return "soft-constraint";
    case Interplay::Sampling:
        return "sampling";
    case Interplay::PrimalDual:
        return "primal-dual";
    }
    return "?";
}

Interplay parseInterplay(const std::string& s) {
    for (auto m : {Interplay::Reasoner, Interplay::SoftConstraint, Interplay::Sampling, Interplay::PrimalDual}) {
        if (interplayName(m) == s) {
            return m;
        }
    }
    throw Error(ErrorCode::ConfigError, "unknown interplay mode '" + s + "'", s);
}

RunConfig RunConfig::defaults(TaskId task) {
    RunConfig c;
    c.task = task;
    switch (task) {
    case TaskId::MnistSum:
        c.semiring = provenance::SemiringSpec::topKGrad(provenance::kUnboundedK);
        c.batchSize = 32;
        c.lr = 2e-3;
        break;
    case TaskId::Shapes:
        c.trainCount = 1000;
        c.testCount = 1000;
        c.epochs = 12;
        c.lr = 1e-3;
        break;
    case TaskId::ToyNer:
        c.semiring = provenance::SemiringSpec::topKGrad(provenance::kUnboundedK);
        c.trainCount = 1000;
        c.testCount = 500;
        c.epochs = 10;
        c.lr = 3e-3;
        break;
    case TaskId::MathInference:
        c.semiring = provenance::SemiringSpec::topKGrad(provenance::kUnboundedK);
        c.trainCount = 3000;
        c.testCount = 1000;
        c.epochs = 20;
        c.lr = 3e-3;
        break;
    }
    return c;
}

void RunConfig::validate() const {
    provenance::checkSpec(semiring);
    auto positive = [](bool ok, const char* what) {
        if (!ok) {
            throw Error(ErrorCode::ConfigError, std::string(what) + " must be positive", what);
        }
    };
    positive(epochs > 0, "epochs");
    positive(batchSize > 0, "batch_size");
    positive(lr > 0.0 && std::isfinite(lr), "lr");
    positive(trainCount > 0, "train_count");
    positive(testCount > 0, "test_count");
    positive(eta > 0.0 && std::isfinite(eta), "eta");
    positive(samples > 0, "samples");
    if (semiring.kind != provenance::SemiringKind::TopKProofsGrad && interplay == Interplay::Reasoner) {
        throw Error(ErrorCode::ConfigError,
                "training through the reasoner needs a gradient semiring (exact or topk:K), got " + semiring.toString());
    }
    bool supported = interplay == Interplay::Reasoner ||
                     (interplay == Interplay::SoftConstraint && task != TaskId::Shapes) ||
                     (interplay == Interplay::Sampling && (task == TaskId::MnistSum || task == TaskId::ToyNer)) ||
                     (interplay == Interplay::PrimalDual && task == TaskId::ToyNer);
    if (!supported) {
        throw Error(ErrorCode::ConfigError,
                "task " + taskName(task) + " does not support interplay " + interplayName(interplay));
    }
}

std::size_t HeadSet::add(neural::Network net, const neural::OptimizerSpec& opt) {
    nets_.push_back(std::move(net));
    opts_.emplace_back(opt);
    return nets_.size() - 1;
}

void HeadSet::zeroGrads() {
    for (auto& n : nets_) {
        n.zeroGrads();
    }
}

void HeadSet::step() {
    for (std::size_t i = 0; i < nets_.size(); ++i) {
        opts_[i].step(nets_[i]);
    }
}

void HeadSet::adopt(const RunConfig& config) {
    if (config.checkpointDir.empty()) {
        return;
    }
    for (auto& net : nets_) {
        auto path = config.checkpointDir / (net.headId() + ".nsyn");
        auto loaded = neural::Network::load(path);
        if (loaded.inputSize() != net.inputSize() || loaded.outputSize() != net.outputSize()) {
            throw Error(ErrorCode::DataError, "checkpoint " + path.string() + " does not fit head " + net.headId(),
                    path.string());
        }
        net = std::move(loaded);
    }
}

double perSample(double ms, std::size_t samples) {
    return samples == 0 ? 0.0 : ms / static_cast<double>(samples);
}

void HeadSet::step(const RunConfig& config) {
    if (config.beforeStep) {
        config.beforeStep(*this);
    }
    step();
}

namespace {

std::map<std::size_t, std::vector<std::size_t>> callsByNet(const std::vector<HeadCall>& calls) {
    std::map<std::size_t, std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < calls.size(); ++i) {
        out[calls[i].net].push_back(i);
    }
    return out;
}

}  // namespace

reasoner::NeuralOutputs forwardCalls(HeadSet& heads, const std::vector<HeadCall>& calls, bool train) {
    reasoner::NeuralOutputs out;
    for (const auto& [net, idx] : callsByNet(calls)) {
        std::size_t width = calls[idx.front()].input.size();
        std::vector<double> data;
        data.reserve(width * idx.size());
        for (std::size_t i : idx) {
            data.insert(data.end(), calls[i].input.begin(), calls[i].input.end());
        }
        auto x = neural::Tensor::from({idx.size(), width}, std::move(data));
        auto y = train ? heads.net(net).forward(x) : heads.net(net).predict(x);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            out[calls[idx[r]].headId] = y.row(r);
        }
    }
    return out;
}

void backwardCalls(HeadSet& heads, const std::vector<HeadCall>& calls, const reasoner::NeuralOutputs& grads) {
    for (const auto& [net, idx] : callsByNet(calls)) {
        std::size_t width = heads.net(net).outputSize();
        neural::Tensor g({idx.size(), width});
        bool any = false;
        for (std::size_t r = 0; r < idx.size(); ++r) {
            auto it = grads.find(calls[idx[r]].headId);
            if (it == grads.end()) {
                continue;
            }
            for (std::size_t c = 0; c < width; ++c) {
                g.at(r, c) = it->second.at(c);
                any = true;
            }
        }
        if (any) {
            heads.net(net).backward(g);
        }
    }
}

AnswerLoss normalizedNll(const std::vector<double>& p, std::size_t target) {
    double z = std::accumulate(p.begin(), p.end(), 0.0);
    AnswerLoss out;
    out.grad.assign(p.size(), 0.0);
    double pt = std::max(target < p.size() ? p[target] : 0.0, neural::kProbabilityFloor);
    if (!(z > 0.0)) {
        out.loss = -std::log(neural::kProbabilityFloor);
        return out;
    }
    out.loss = -std::log(std::min(pt / z, 1.0));
    for (auto& g : out.grad) {
        g = 1.0 / z;
    }
    if (target < p.size()) {
        out.grad[target] -= 1.0 / pt;
    }
    return out;
}

AnswerLoss binaryNll(double p, bool yes) {
    double q = yes ? p : 1.0 - p;
    double clamped = std::max(q, neural::kProbabilityFloor);
    AnswerLoss out;
    out.loss = -std::log(clamped);
    out.grad = {yes ? -1.0 / clamped : 1.0 / clamped};
    return out;
}

ReasonerSession::ReasonerSession(const std::string& source, const provenance::SemiringSpec& spec)
    : ctx_(reasoner::compile(logic::validate(logic::parseSource(source))), spec) {}

std::vector<reasoner::QueryResult> ReasonerSession::ask(const reasoner::NeuralOutputs& outputs,
        const logic::Atom& atom) {
    Stopwatch sw;
    reasoner::seed_facts(ctx_, outputs);
    reasoner::evaluate(ctx_);
    auto out = reasoner::queryAtom(ctx_, atom, true);
    reasoningMs_ += sw.ms();
    return out;
}

void ReasonerSession::addGradient(const provenance::GradProb& g, double scale, const reasoner::NeuralOutputs& outputs,
        reasoner::NeuralOutputs& grads) const {
    reasoner::accumulateHeadGradients(ctx_, g, scale, outputs, grads);
}

const logic::ValidatedProgram& ReasonerSession::program() const {
    return ctx_.program();
}

const logic::Atom& ReasonerSession::queryAtom(const std::string& name) const {
    return ctx_.program().query(name).atom;
}

void addInto(reasoner::NeuralOutputs& acc, const reasoner::NeuralOutputs& g, double scale) {
    for (const auto& [head, v] : g) {
        auto& buf = acc[head];
        if (buf.empty()) {
            buf.assign(v.size(), 0.0);
        }
        for (std::size_t i = 0; i < v.size(); ++i) {
            buf[i] += scale * v[i];
        }
    }
}

std::vector<std::size_t> epochOrder(std::size_t n, std::uint64_t seed, std::size_t epoch) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed * 1000003 + epoch);
    std::shuffle(order.begin(), order.end(), rng);
    return order;
}

TaskResult runTask(const RunConfig& config) {
    config.validate();
    switch (config.task) {
    case TaskId::MnistSum:
        return run_mnist_sum(config);
    case TaskId::Shapes:
        return run_shapes(config);
    case TaskId::ToyNer:
        return run_toy_ner(config);
    case TaskId::MathInference:
        return run_math_inference(config);
    }
    throw Error(ErrorCode::ConfigError, "unknown task");
}

}  // namespace nesy::tasks
