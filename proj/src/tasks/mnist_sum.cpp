#include "nesy/tasks/mnist_sum.h"

#include "nesy/error.h"
#include "nesy/tasks/idx.h"

#include <cmath>
#include <sstream>

namespace nesy::tasks {

std::string mnistSumProgram() {
    std::ostringstream os;
    os << "rel digit1(int).\nrel digit2(int).\nrel sum2(int).\n";
    for (const char* head : {"img_a", "img_b"}) {
        const char* rel = head[4] == 'a' ? "digit1" : "digit2";
        for (int d = 0; d < 10; ++d) {
            os << (d ? "; " : "") << "nn(" << head << ", " << d << ")::" << rel << "(" << d << ")";
        }
        os << ".\n";
    }
    os << "sum2(C) :- digit1(A), digit2(B), C == A + B.\n";
    os << "query sum2(S).\n";
    return os.str();
}

DigitSet readIdxDigits(const std::filesystem::path& images, const std::filesystem::path& labels) {
    IdxData img = parse_idx(readFile(images));
    IdxData lab = parse_idx(readFile(labels));
    if (img.magic != kIdxImagesMagic || lab.magic != kIdxLabelsMagic) {
        throw Error(ErrorCode::DataError, "expected an images file and a labels file", images.string());
    }
    if (img.dims.size() != 3 || img.dims[1] != kDigitSide || img.dims[2] != kDigitSide) {
        throw Error(ErrorCode::DataError, "digit images must be 28x28", images.string());
    }
    if (img.dims[0] != lab.dims[0]) {
        throw Error(ErrorCode::DataError, "image and label counts differ", labels.string());
    }
    DigitSet out;
    out.pixels = std::move(img.payload);
    out.labels = lab.labels();
    for (int l : out.labels) {
        if (l < 0 || l > 9) {
            throw Error(ErrorCode::DataError, "digit label outside 0..9", labels.string());
        }
    }
    return out;
}

namespace {

DigitSet firstN(DigitSet set, std::size_t n, const std::string& what) {
    if (set.size() < n) {
        throw Error(ErrorCode::DataError,
                what + " holds " + std::to_string(set.size()) + " digits, need " + std::to_string(n));
    }
    set.labels.resize(n);
    set.pixels.resize(n * kDigitPixels);
    return set;
}

std::vector<HeadCall> pairCalls(const MnistPairs& data, std::size_t i) {
    return {{0, "img_a", data.digits.image(2 * i)}, {0, "img_b", data.digits.image(2 * i + 1)}};
}

}  // namespace

MnistData loadMnistData(const RunConfig& config) {
    MnistData out;
    if (config.dataDir.empty()) {
        out.train.digits = gen_synthetic_digits(config.seed, 2 * config.trainCount);
        out.test.digits = gen_synthetic_digits(config.seed + 7919, 2 * config.testCount);
        return out;
    }
    const auto& d = config.dataDir;
    out.train.digits = firstN(readIdxDigits(d / kMnistTrainImages, d / kMnistTrainLabels), 2 * config.trainCount,
            (d / kMnistTrainImages).string());
    out.test.digits = firstN(readIdxDigits(d / kMnistTestImages, d / kMnistTestLabels), 2 * config.testCount,
            (d / kMnistTestImages).string());
    return out;
}

constraints::Expr sumConstraint(int s) {
    std::vector<constraints::Expr> pairs;
    for (int a = 0; a <= 9; ++a) {
        int b = s - a;
        if (b >= 0 && b <= 9) {
            pairs.push_back(constraints::andL({constraints::leaf("img_a", static_cast<std::size_t>(a)),
                    constraints::leaf("img_b", static_cast<std::size_t>(b))}));
        }
    }
    return constraints::orL(std::move(pairs));
}

std::vector<double> sumDistribution(ReasonerSession& session, const reasoner::NeuralOutputs& outputs) {
    std::vector<double> p(19, 0.0);
    for (const auto& r : session.ask(outputs, session.queryAtom("sum2"))) {
        p.at(static_cast<std::size_t>(r.tuple[0].asInt())) = r.probability;
    }
    return p;
}

Metrics evaluate_mnist_sum(const RunConfig& config, const neural::Network& head, const MnistPairs& test) {
    HeadSet heads;
    heads.add(head, neural::OptimizerSpec::sgd(1.0));
    ReasonerSession session(mnistSumProgram(), config.semiring);
    Metrics m;
    std::size_t sumHits = 0;
    std::size_t digitHits = 0;
    std::size_t consistent = 0;
    std::size_t mapDigitHits = 0;
    Stopwatch sw;
    for (std::size_t i = 0; i < test.size(); ++i) {
        auto outputs = forwardCalls(heads, pairCalls(test, i), false);
        auto p = sumDistribution(session, outputs);
        sumHits += static_cast<int>(neural::argmax(p)) == test.sum(i);
        digitHits += static_cast<int>(neural::argmax(outputs["img_a"])) == test.digitA(i);
        digitHits += static_cast<int>(neural::argmax(outputs["img_b"])) == test.digitB(i);
        auto map = constraints::constrained_map(outputs, {sumConstraint(test.sum(i))});
        int a = static_cast<int>(map.assignment.at("img_a"));
        int b = static_cast<int>(map.assignment.at("img_b"));
        consistent += !map.infeasible && a + b == test.sum(i);
        mapDigitHits += (a == test.digitA(i)) + (b == test.digitB(i));
    }
    double n = static_cast<double>(test.size());
    m.testMsPerSample = sw.ms() / n;
    m.values["sum_accuracy"] = static_cast<double>(sumHits) / n;
    m.values["digit_accuracy"] = static_cast<double>(digitHits) / (2 * n);
    m.values["constrained_consistency"] = static_cast<double>(consistent) / n;
    m.values["constrained_digit_accuracy"] = static_cast<double>(mapDigitHits) / (2 * n);
    m.values["test_reason_ms_per_sample"] = session.reasoningMs() / n;
    return m;
}

TaskResult run_mnist_sum(const RunConfig& config) {
    config.validate();
    MnistData data = loadMnistData(config);
    HeadSet heads;
    heads.add(neural::Network::mlp("digit", {kDigitPixels, 64, 10}, true, config.seed),
            neural::OptimizerSpec::adam(config.lr));
    heads.adopt(config);
    ReasonerSession session(mnistSumProgram(), config.semiring);

    Metrics metrics;
    Stopwatch trainClock;
    double scale = 1.0 / static_cast<double>(config.batchSize);
    for (std::size_t epoch = 0; epoch < config.trainingEpochs(); ++epoch) {
        double epochLoss = 0.0;
        auto order = epochOrder(data.train.size(), config.seed, epoch);
        heads.zeroGrads();
        for (std::size_t step = 0; step < order.size(); ++step) {
            std::size_t i = order[step];
            int label = data.train.sum(i);
            auto calls = pairCalls(data.train, i);
            auto outputs = forwardCalls(heads, calls, true);
            reasoner::NeuralOutputs grads;
            switch (config.interplay) {
            case Interplay::Reasoner: {
                auto results = session.ask(outputs, session.queryAtom("sum2"));
                std::vector<double> p(19, 0.0);
                for (const auto& r : results) {
                    p.at(static_cast<std::size_t>(r.tuple[0].asInt())) = r.probability;
                }
                auto loss = normalizedNll(p, static_cast<std::size_t>(label));
                epochLoss += loss.loss;
                for (const auto& r : results) {
                    double d = loss.grad[static_cast<std::size_t>(r.tuple[0].asInt())];
                    if (d != 0.0 && r.grad) {
                        session.addGradient(*r.grad, d * scale, outputs, grads);
                    }
                }
                break;
            }
            case Interplay::SoftConstraint: {
                auto soft = constraints::soft_loss_grad(sumConstraint(label), outputs);
                double degree = std::max(1.0 - soft.loss, neural::kProbabilityFloor);
                epochLoss += -std::log(degree);
                addInto(grads, soft.grads, scale / degree);
                break;
            }
            default: {
                auto sampled = constraints::sampling_loss(sumConstraint(label), outputs, config.samples,
                        config.seed * 31 + epoch * order.size() + step);
                epochLoss += sampled.loss;
                addInto(grads, sampled.grads, scale);
                break;
            }
            }
            backwardCalls(heads, calls, grads);
            if ((step + 1) % config.batchSize == 0 || step + 1 == order.size()) {
                heads.step(config);
                heads.zeroGrads();
            }
        }
        metrics.epochLoss.push_back(epochLoss / static_cast<double>(order.size()));
    }
    double trainMs = trainClock.ms();
    double trainReasonMs = session.reasoningMs();

    TaskResult out;
    out.metrics = evaluate_mnist_sum(config, heads.net(0), data.test);
    out.metrics.epochLoss = metrics.epochLoss;
    out.metrics.trainMsPerSample = perSample(trainMs, config.trainingEpochs() * data.train.size());
    out.metrics.values["train_reason_ms_per_sample"] =
            perSample(trainReasonMs, config.trainingEpochs() * data.train.size());
    out.heads = heads.release();
    return out;
}

}  // namespace nesy::tasks
