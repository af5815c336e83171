#include "nesy/tasks/toy_ner.h"

#include "nesy/error.h"
#include "nesy/tasks/jsonl.h"

#include <cmath>
#include <random>
#include <sstream>

namespace nesy::tasks {

using constraints::andL;
using constraints::Expr;
using constraints::is;
using constraints::notL;
using constraints::orL;

bool nerConstraint1(const std::array<bool, 3>& p, const std::array<bool, 3>& w) {
    return p[0] && w[0] && p[1] && w[1];
}

bool nerConstraint2(const std::array<bool, 3>& p, const std::array<bool, 3>& w) {
    return (p[1] && w[1]) || (p[2] && w[2]);
}

NerData gen_toy_ner(std::uint64_t seed, std::size_t trainCount, std::size_t testCount) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::bernoulli_distribution truth(0.8);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> personSign(kNerDim);
    std::vector<double> locationSign(kNerDim);
    for (std::size_t d = 0; d < kNerDim; ++d) {
        personSign[d] = coin(rng) ? 1.0 : -1.0;
        locationSign[d] = coin(rng) ? 1.0 : -1.0;
    }
    auto embed = [&](const std::vector<double>& sign, bool positive) {
        std::vector<double> v(kNerDim);
        for (std::size_t d = 0; d < kNerDim; ++d) {
            v[d] = (positive ? 1.0 : -1.0) * sign[d] + noise(rng);
        }
        return v;
    };
    auto sample = [&] {
        NerSample s;
        for (std::size_t i = 0; i < 3; ++i) {
            s.isRealPerson[i] = truth(rng);
            s.worksIn[i] = truth(rng);
            s.persons[i] = embed(personSign, s.isRealPerson[i]);
            s.locations[i] = embed(locationSign, s.worksIn[i]);
        }
        s.constraint1 = nerConstraint1(s.isRealPerson, s.worksIn);
        s.constraint2 = nerConstraint2(s.isRealPerson, s.worksIn);
        return s;
    };
    NerData out;
    for (std::size_t i = 0; i < trainCount; ++i) {
        out.train.push_back(sample());
    }
    for (std::size_t i = 0; i < testCount; ++i) {
        out.test.push_back(sample());
    }
    return out;
}

std::vector<std::filesystem::path> writeNer(const NerData& data, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::vector<nlohmann::json> records;
    for (const auto* split : {&data.train, &data.test}) {
        const char* name = split == &data.train ? "train" : "test";
        for (std::size_t i = 0; i < split->size(); ++i) {
            const auto& s = (*split)[i];
            records.push_back({{"id", std::string(name) + "_" + std::to_string(i)}, {"split", name},
                    {"persons", s.persons}, {"locations", s.locations}, {"is_real_person", s.isRealPerson},
                    {"works_in", s.worksIn}, {"constraint1", s.constraint1}, {"constraint2", s.constraint2}});
        }
    }
    writeJsonl(dir / kNerRecords, records);
    return {dir / kNerRecords};
}

NerData readNer(const std::filesystem::path& dir) {
    auto path = dir / kNerRecords;
    auto records = readJsonl(path);
    NerData out;
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& j = records[r];
        NerSample s = decodeRecord(path, r + 1, [&] {
            NerSample s;
            s.persons = j.at("persons").get<std::array<std::vector<double>, 3>>();
            s.locations = j.at("locations").get<std::array<std::vector<double>, 3>>();
            s.isRealPerson = j.at("is_real_person").get<std::array<bool, 3>>();
            s.worksIn = j.at("works_in").get<std::array<bool, 3>>();
            s.constraint1 = j.at("constraint1").get<bool>();
            s.constraint2 = j.at("constraint2").get<bool>();
            return s;
        });
        for (std::size_t i = 0; i < 3; ++i) {
            if (s.persons[i].size() != kNerDim || s.locations[i].size() != kNerDim) {
                throwRecordError(path, r + 1, "embeddings must have " + std::to_string(kNerDim) + " entries");
            }
        }
        if (s.constraint1 != nerConstraint1(s.isRealPerson, s.worksIn) ||
                s.constraint2 != nerConstraint2(s.isRealPerson, s.worksIn)) {
            throwRecordError(path, r + 1, "constraint labels contradict the concepts");
        }
        (j.value("split", "train") == "test" ? out.test : out.train).push_back(std::move(s));
    }
    return out;
}

std::string nerProgram() {
    std::ostringstream os;
    os << "rel person(int).\nrel works(int).\nrel c1().\nrel c2().\n";
    for (int i = 1; i <= 3; ++i) {
        os << "nn(person_" << i << ", 1)::person(" << i << ").\n";
        os << "nn(works_" << i << ", 1)::works(" << i << ").\n";
    }
    os << "c1() :- person(1), works(1), person(2), works(2).\n";
    os << "c2() :- person(2), works(2).\n";
    os << "c2() :- person(3), works(3).\n";
    os << "query c1().\nquery c2().\n";
    return os.str();
}

Expr nerConstraint1Expr() {
    return andL({is("person_1"), is("works_1"), is("person_2"), is("works_2")});
}

Expr nerConstraint2Expr() {
    return orL({andL({is("person_2"), is("works_2")}), andL({is("person_3"), is("works_3")})});
}

std::vector<HeadCall> nerCalls(const NerSample& s) {
    std::vector<HeadCall> calls;
    for (std::size_t i = 0; i < 3; ++i) {
        calls.push_back({0, "person_" + std::to_string(i + 1), s.persons[i]});
        std::vector<double> pair = s.persons[i];
        pair.insert(pair.end(), s.locations[i].begin(), s.locations[i].end());
        calls.push_back({1, "works_" + std::to_string(i + 1), std::move(pair)});
    }
    return calls;
}

namespace {

double probabilityOf(const std::vector<reasoner::QueryResult>& rs) {
    return rs.empty() ? 0.0 : rs.front().probability;
}

/** Query labels as constraints: the query holds iff its label says so. */
Expr target(const Expr& query, bool label) {
    return label ? query : notL(query);
}

}  // namespace

std::pair<double, double> nerQueryProbabilities(ReasonerSession& session, const reasoner::NeuralOutputs& outputs) {
    double c1 = probabilityOf(session.ask(outputs, session.queryAtom("c1")));
    double c2 = probabilityOf(session.ask(outputs, session.queryAtom("c2")));
    return {c1, c2};
}

TaskResult run_toy_ner(const RunConfig& config) {
    config.validate();
    NerData data = config.dataDir.empty() ? gen_toy_ner(config.seed, config.trainCount, config.testCount)
                                          : readNer(config.dataDir);
    HeadSet heads;
    heads.add(neural::Network::mlp("is_real_person", {kNerDim, 16, 2}, true, config.seed),
            neural::OptimizerSpec::adam(config.lr));
    heads.add(neural::Network::mlp("works_in", {2 * kNerDim, 16, 2}, true, config.seed + 1),
            neural::OptimizerSpec::adam(config.lr));
    provenance::SemiringSpec spec = config.semiring.kind == provenance::SemiringKind::TopKProofsGrad
                                            ? config.semiring
                                            : provenance::SemiringSpec::topKGrad(provenance::kUnboundedK);
    heads.adopt(config);
    ReasonerSession session(nerProgram(), spec);
    constraints::LagrangeState lagrange;
    lagrange.eta = config.eta;

    Metrics metrics;
    Stopwatch trainClock;
    double scale = 1.0 / static_cast<double>(config.batchSize);
    bool secondQuery = !config.conjunctionOnly && config.interplay != Interplay::PrimalDual;
    for (std::size_t epoch = 0; epoch < config.trainingEpochs(); ++epoch) {
        double epochLoss = 0.0;
        auto order = epochOrder(data.train.size(), config.seed, epoch);
        heads.zeroGrads();
        for (std::size_t step = 0; step < order.size(); ++step) {
            const NerSample& s = data.train[order[step]];
            auto calls = nerCalls(s);
            auto outputs = forwardCalls(heads, calls, true);
            reasoner::NeuralOutputs grads;
            Expr t1 = target(nerConstraint1Expr(), s.constraint1);
            Expr t2 = target(nerConstraint2Expr(), s.constraint2);
            auto throughReasoner = [&](const std::string& q, bool label) {
                auto rs = session.ask(outputs, session.queryAtom(q));
                auto loss = binaryNll(probabilityOf(rs), label);
                epochLoss += loss.loss;
                if (!rs.empty() && rs.front().grad) {
                    session.addGradient(*rs.front().grad, loss.grad[0] * scale, outputs, grads);
                }
            };
            auto throughSoftLogic = [&](const Expr& t, double weight) {
                auto soft = constraints::soft_loss_grad(t, outputs);
                double degree = std::max(1.0 - soft.loss, neural::kProbabilityFloor);
                epochLoss += -std::log(degree) * weight;
                addInto(grads, soft.grads, weight * scale / degree);
            };
            switch (config.interplay) {
            case Interplay::Reasoner:
                throughReasoner("c1", s.constraint1);
                if (secondQuery) {
                    throughReasoner("c2", s.constraint2);
                }
                break;
            case Interplay::SoftConstraint:
                throughSoftLogic(t1, 1.0);
                if (secondQuery) {
                    throughSoftLogic(t2, 1.0);
                }
                break;
            case Interplay::Sampling: {
                std::uint64_t sampleSeed = config.seed * 31 + epoch * order.size() + step;
                for (const Expr* t : {&t1, &t2}) {
                    if (t == &t2 && !secondQuery) {
                        break;
                    }
                    auto sampled = constraints::sampling_loss(*t, outputs, config.samples, sampleSeed++);
                    epochLoss += sampled.loss;
                    addInto(grads, sampled.grads, scale);
                }
                break;
            }
            case Interplay::PrimalDual: {
                throughReasoner("c1", s.constraint1);
                auto soft1 = constraints::soft_loss_grad(t1, outputs);
                auto soft2 = constraints::soft_loss_grad(t2, outputs);
                auto pd = constraints::primal_dual_step(lagrange,
                        {{"constraint1", 1.0 - soft1.loss}, {"constraint2", 1.0 - soft2.loss}});
                epochLoss += pd.augmentedLoss;
                addInto(grads, soft1.grads, pd.weights["constraint1"] * scale);
                addInto(grads, soft2.grads, pd.weights["constraint2"] * scale);
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
    metrics.trainMsPerSample = perSample(trainClock.ms(), config.trainingEpochs() * data.train.size());

    std::size_t hits1 = 0;
    std::size_t hits2 = 0;
    std::size_t conceptHits = 0;
    std::size_t violations = 0;
    double maxDisagreement = 0.0;
    Stopwatch testClock;
    for (const auto& s : data.test) {
        auto calls = nerCalls(s);
        auto outputs = forwardCalls(heads, calls, false);
        double p1;
        double p2;
        if (config.interplay == Interplay::Reasoner || config.interplay == Interplay::PrimalDual) {
            std::tie(p1, p2) = nerQueryProbabilities(session, outputs);
        } else {
            p1 = constraints::soft_eval(nerConstraint1Expr(), outputs);
            p2 = constraints::soft_eval(nerConstraint2Expr(), outputs);
        }
        hits1 += (p1 > 0.5) == s.constraint1;
        hits2 += (p2 > 0.5) == s.constraint2;
        constraints::HardAssignment h;
        for (std::size_t i = 0; i < 3; ++i) {
            auto pi = neural::argmax(outputs["person_" + std::to_string(i + 1)]);
            auto wi = neural::argmax(outputs["works_" + std::to_string(i + 1)]);
            conceptHits += (pi == 1) == s.isRealPerson[i];
            conceptHits += (wi == 1) == s.worksIn[i];
            h["person_" + std::to_string(i + 1)] = pi;
            h["works_" + std::to_string(i + 1)] = wi;
        }
        bool ok = constraints::hard_eval(target(nerConstraint1Expr(), s.constraint1), h) &&
                  constraints::hard_eval(target(nerConstraint2Expr(), s.constraint2), h);
        violations += !ok;
        auto [r1, r2] = nerQueryProbabilities(session, outputs);
        maxDisagreement = std::max({maxDisagreement,
                std::abs(r1 - constraints::soft_eval(nerConstraint1Expr(), outputs)),
                std::abs(r2 - constraints::soft_eval(nerConstraint2Expr(), outputs))});
    }
    double n = static_cast<double>(data.test.size());
    metrics.testMsPerSample = testClock.ms() / n;
    metrics.values["constraint1_acc"] = static_cast<double>(hits1) / n;
    metrics.values["constraint2_acc"] = static_cast<double>(hits2) / n;
    metrics.values["concept_acc"] = static_cast<double>(conceptHits) / (6 * n);
    metrics.values["violation_rate"] = static_cast<double>(violations) / n;
    metrics.values["path_disagreement"] = maxDisagreement;
    if (config.interplay == Interplay::PrimalDual) {
        metrics.lambdas = lagrange.multipliers;
    }
    TaskResult out;
    out.metrics = std::move(metrics);
    out.heads = heads.release();
    return out;
}

}  // namespace nesy::tasks
