#include "nesy/tasks/math_inference.h"

#include "nesy/tasks/jsonl.h"

#include <cmath>
#include <numeric>
#include <random>

namespace nesy::tasks {

bool mathProp1(const MathList& l) {
    return std::accumulate(l.begin(), l.end(), 0.0) > 0.0;
}

bool mathProp2(const MathList& l) {
    double total = 0.0;
    for (double x : l) {
        total += std::abs(x);
    }
    return total > 0.5;
}

bool mathRel1(const MathList& l1, const MathList& l2) {
    return (l1[0] > 0) == (l2[0] > 0);
}

bool mathRel2(const MathList& l1, const MathList& l2) {
    return (l1.back() > 0) != (l2.back() > 0);
}

namespace {

bool property(int which, const MathList& l) {
    return which == 1 ? mathProp1(l) : mathProp2(l);
}

bool relation(int which, const MathList& l1, const MathList& l2) {
    return which == 1 ? mathRel1(l1, l2) : mathRel2(l1, l2);
}

std::vector<double> pairInput(const MathList& l1, const MathList& l2) {
    std::vector<double> v(l1.begin(), l1.end());
    v.insert(v.end(), l2.begin(), l2.end());
    return v;
}

bool predictsTrue(const neural::Network& net, const std::vector<double>& input) {
    return neural::argmax(net.predict(neural::Tensor::vector(input)).data()) == 1;
}

}  // namespace

std::vector<MathSample> gen_math(std::uint64_t seed, std::size_t count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    std::uniform_int_distribution<int> index(1, 2);
    std::vector<MathSample> out(count);
    for (auto& s : out) {
        for (std::size_t i = 0; i < kMathListSize; ++i) {
            s.l1[i] = value(rng);
            s.l2[i] = value(rng);
        }
        s.propA = index(rng);
        s.propB = index(rng);
        s.relation = index(rng);
        s.label = property(s.propA, s.l1) && property(s.propB, s.l2) && relation(s.relation, s.l1, s.l2);
    }
    return out;
}

std::vector<std::filesystem::path> writeMath(const MathData& data, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::vector<nlohmann::json> records;
    for (const auto* split : {&data.train, &data.test}) {
        const char* name = split == &data.train ? "train" : "test";
        for (std::size_t i = 0; i < split->size(); ++i) {
            const auto& s = (*split)[i];
            records.push_back({{"id", std::string(name) + "_" + std::to_string(i)}, {"split", name}, {"l1", s.l1},
                    {"l2", s.l2}, {"prop_a", s.propA}, {"prop_b", s.propB}, {"relation", s.relation},
                    {"label", s.label}});
        }
    }
    writeJsonl(dir / kMathRecords, records);
    return {dir / kMathRecords};
}

MathData readMath(const std::filesystem::path& dir) {
    auto path = dir / kMathRecords;
    auto records = readJsonl(path);
    MathData out;
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& j = records[r];
        MathSample s = decodeRecord(path, r + 1, [&] {
            MathSample s;
            s.l1 = j.at("l1").get<MathList>();
            s.l2 = j.at("l2").get<MathList>();
            s.propA = j.at("prop_a").get<int>();
            s.propB = j.at("prop_b").get<int>();
            s.relation = j.at("relation").get<int>();
            s.label = j.at("label").get<bool>();
            return s;
        });
        for (int id : {s.propA, s.propB, s.relation}) {
            if (id != 1 && id != 2) {
                throwRecordError(path, r + 1, "property and relation ids must be 1 or 2");
            }
        }
        if (s.label != (property(s.propA, s.l1) && property(s.propB, s.l2) && relation(s.relation, s.l1, s.l2))) {
            throwRecordError(path, r + 1, "label contradicts the lists");
        }
        (j.value("split", "train") == "test" ? out.test : out.train).push_back(std::move(s));
    }
    return out;
}

std::string mathProgram() {
    return "rel pa().\nrel pb().\nrel r().\nrel inference().\n"
           "nn(pa, 1)::pa().\nnn(pb, 1)::pb().\nnn(r, 1)::r().\n"
           "inference() :- pa(), pb(), r().\n"
           "query inference().\n";
}

constraints::Expr mathConstraint() {
    return constraints::andL({constraints::is("pa"), constraints::is("pb"), constraints::is("r")});
}

std::vector<HeadCall> mathCalls(const MathSample& s) {
    return {
            {static_cast<std::size_t>(s.propA - 1), "pa", std::vector<double>(s.l1.begin(), s.l1.end())},
            {static_cast<std::size_t>(s.propB - 1), "pb", std::vector<double>(s.l2.begin(), s.l2.end())},
            {static_cast<std::size_t>(1 + s.relation), "r", pairInput(s.l1, s.l2)},
    };
}

TaskResult run_math_inference(const RunConfig& config) {
    config.validate();
    MathData data = config.dataDir.empty()
                            ? MathData{gen_math(config.seed, config.trainCount), gen_math(config.seed + 7919, config.testCount)}
                            : readMath(config.dataDir);
    const auto& train = data.train;
    const auto& test = data.test;
    HeadSet heads;
    const char* names[] = {"prop1", "prop2", "rel1", "rel2"};
    for (std::size_t i = 0; i < 4; ++i) {
        std::size_t in = i < 2 ? kMathListSize : 2 * kMathListSize;
        heads.add(neural::Network::mlp(names[i], {in, 16, 2}, true, config.seed + i),
                neural::OptimizerSpec::adam(config.lr));
    }
    heads.adopt(config);
    ReasonerSession session(mathProgram(), config.semiring);
    const auto& queryAtom = session.queryAtom("inference");

    Metrics metrics;
    Stopwatch trainClock;
    double scale = 1.0 / static_cast<double>(config.batchSize);
    for (std::size_t epoch = 0; epoch < config.trainingEpochs(); ++epoch) {
        double epochLoss = 0.0;
        auto order = epochOrder(train.size(), config.seed, epoch);
        heads.zeroGrads();
        for (std::size_t step = 0; step < order.size(); ++step) {
            const MathSample& s = train[order[step]];
            auto calls = mathCalls(s);
            auto outputs = forwardCalls(heads, calls, true);
            reasoner::NeuralOutputs grads;
            if (config.interplay == Interplay::Reasoner) {
                auto rs = session.ask(outputs, queryAtom);
                double p = rs.empty() ? 0.0 : rs.front().probability;
                auto loss = binaryNll(p, s.label);
                epochLoss += loss.loss;
                if (!rs.empty() && rs.front().grad) {
                    session.addGradient(*rs.front().grad, loss.grad[0] * scale, outputs, grads);
                }
            } else {
                auto soft = constraints::soft_loss_grad(mathConstraint(), outputs);
                double degree = 1.0 - soft.loss;
                auto loss = binaryNll(degree, s.label);
                epochLoss += loss.loss;
                // d loss / d p = d loss / d degree * (- d soft.loss / d p)
                addInto(grads, soft.grads, -loss.grad[0] * scale);
            }
            backwardCalls(heads, calls, grads);
            if ((step + 1) % config.batchSize == 0 || step + 1 == order.size()) {
                heads.step(config);
                heads.zeroGrads();
            }
        }
        metrics.epochLoss.push_back(epochLoss / static_cast<double>(order.size()));
    }
    metrics.trainMsPerSample = perSample(trainClock.ms(), config.trainingEpochs() * train.size());

    std::size_t globalHits = 0;
    std::size_t propertyHits = 0;
    std::size_t relationHits = 0;
    Stopwatch testClock;
    for (const auto& s : test) {
        auto outputs = forwardCalls(heads, mathCalls(s), false);
        double p;
        if (config.interplay == Interplay::Reasoner) {
            auto rs = session.ask(outputs, queryAtom);
            p = rs.empty() ? 0.0 : rs.front().probability;
        } else {
            p = constraints::soft_eval(mathConstraint(), outputs);
        }
        globalHits += (p > 0.5) == s.label;
    }
    metrics.testMsPerSample = testClock.ms() / static_cast<double>(test.size());
    for (const auto& s : test) {
        std::vector<double> a(s.l1.begin(), s.l1.end());
        std::vector<double> b(s.l2.begin(), s.l2.end());
        for (int k = 1; k <= 2; ++k) {
            auto& net = heads.net(static_cast<std::size_t>(k - 1));
            propertyHits += predictsTrue(net, a) == property(k, s.l1);
            propertyHits += predictsTrue(net, b) == property(k, s.l2);
            auto& rel = heads.net(static_cast<std::size_t>(1 + k));
            relationHits += predictsTrue(rel, pairInput(s.l1, s.l2)) == relation(k, s.l1, s.l2);
        }
    }
    double n = static_cast<double>(test.size());
    metrics.values["global_acc"] = static_cast<double>(globalHits) / n;
    metrics.values["property_acc"] = static_cast<double>(propertyHits) / (4 * n);
    metrics.values["relation_acc"] = static_cast<double>(relationHits) / (2 * n);
    TaskResult out;
    out.metrics = std::move(metrics);
    out.heads = heads.release();
    return out;
}

}  // namespace nesy::tasks
