#include "nesy/cli/commands.h"
#include "nesy/cli/report.h"
#include "nesy/error.h"
#include "nesy/tasks/mnist_sum.h"
#include "nesy/tasks/shapes.h"
#include "nesy/tasks/toy_ner.h"
#include "nesy/verify/suites.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <unistd.h>

using namespace nesy;
using tasks::Interplay;
using tasks::RunConfig;
using tasks::TaskId;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Clock {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fixed(double v, int digits = 3) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string sci(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(1) << v;
    return os.str();
}

std::string describe(const verify::SuiteResult& s) {
    std::string out = s.name + " n=" + std::to_string(s.instances) + " max_err=" + sci(s.maxError);
    if (s.excluded > 0) {
        out += " excluded=" + std::to_string(s.excluded);
    }
    if (!s.passed()) {
        out += " failures=" + std::to_string(s.failures) + " first: " + s.firstFailure;
    }
    return out;
}

double value(const tasks::Metrics& m, const std::string& key) {
    auto it = m.values.find(key);
    return it == m.values.end() ? std::nan("") : it->second;
}

Outcome oracleEquivalence() {
    auto s = verify::oracleProbabilities(200, 1);
    bool fast = s.seconds < 60.0;
    return {s.passed() && s.instances >= 200 && fast, describe(s) + " time=" + fixed(s.seconds, 1) + "s"};
}

Outcome gradientSoundness() {
    Outcome o{true, {}};
    for (const auto& s : cli::cmd_gradcheck()) {
        o.pass = o.pass && s.passed() && s.instances >= 1000 && s.maxError < verify::kGradientTolerance;
        o.detail += (o.detail.empty() ? "" : "; ") + describe(s);
    }
    return o;
}

Outcome semiringLaws() {
    Outcome o{true, {}};
    using provenance::SemiringSpec;
    for (const auto& spec : {SemiringSpec::boolean(), SemiringSpec::maxMin(), SemiringSpec::addMult(),
                 SemiringSpec::topK(64), SemiringSpec::topKGrad(64)}) {
        auto s = verify::semiringLaws(spec, 10000, 7);
        o.pass = o.pass && s.passed() && s.instances >= 10000;
        o.detail += (o.detail.empty() ? "" : "; ") + spec.toString() + (s.passed() ? " ok" : " " + describe(s));
    }
    return o;
}

Outcome normalization() {
    tasks::ReasonerSession session(tasks::mnistSumProgram(),
            provenance::SemiringSpec::topKGrad(provenance::kUnboundedK));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        reasoner::NeuralOutputs out;
        for (const char* head : {"img_a", "img_b"}) {
            std::vector<double> v(10);
            for (auto& x : v) {
                x = u(rng) + 1e-3;
            }
            double total = std::accumulate(v.begin(), v.end(), 0.0);
            for (auto& x : v) {
                x /= total;
            }
            out[head] = v;
        }
        auto p = tasks::sumDistribution(session, out);
        worst = std::max(worst, std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0));
    }
    reasoner::NeuralOutputs uniform{{"img_a", std::vector<double>(10, 0.1)}, {"img_b", std::vector<double>(10, 0.1)}};
    double p9 = tasks::sumDistribution(session, uniform)[9];
    double p9err = std::abs(p9 - 0.1);
    return {worst <= 1e-9 && p9err <= 1e-12,
            "200 random head pairs max |sum-1|=" + sci(worst) + "; uniform P(sum2(9))=" + fixed(p9, 15) +
                    " err=" + sci(p9err)};
}

Outcome shapesFidelity() {
    auto data = tasks::gen_shapes(1, 2000);
    std::size_t bad = 0;
    std::size_t yes[2] = {0, 0};
    int split = 0;
    for (const auto* scenes : {&data.train, &data.test}) {
        for (const auto& s : *scenes) {
            yes[split] += s.label;
            std::size_t d = tasks::distractorCount(s);
            bad += !tasks::nonOverlapping(s.objects) || d < 1 || d > 3 || s.label != tasks::sceneAnswer(s.objects);
        }
        ++split;
    }
    bool pass = data.train.size() == 1000 && data.test.size() == 1000 && yes[0] == 500 && yes[1] == 500 && bad == 0;
    return {pass, "train=" + std::to_string(data.train.size()) + " (yes " + std::to_string(yes[0]) + ") test=" +
                          std::to_string(data.test.size()) + " (yes " + std::to_string(yes[1]) +
                          ") invalid scenes=" + std::to_string(bad)};
}

struct LearningRun {
    std::string task;
    tasks::Metrics metrics;
    double seconds = 0.0;
};

std::vector<LearningRun> learningRuns;

Outcome desktopLearning() {
    Outcome o{true, {}};
    struct Threshold {
        std::string key;
        double min;
    };
    std::vector<std::pair<TaskId, std::vector<Threshold>>> plan{
            {TaskId::MnistSum, {{"digit_accuracy", 0.80}}},
            {TaskId::Shapes, {{"answer_accuracy", 0.90}}},
            {TaskId::ToyNer, {{"constraint1_acc", 0.90}, {"constraint2_acc", 0.90}, {"concept_acc", 0.85}}},
            {TaskId::MathInference, {{"global_acc", 0.90}}},
    };
    for (const auto& [task, thresholds] : plan) {
        auto config = RunConfig::defaults(task);
        config.seed = 1;
        Clock clock;
        auto result = tasks::runTask(config);
        LearningRun run{tasks::taskName(task), result.metrics, clock.seconds()};
        std::string line = run.task + ":";
        bool ok = run.seconds <= 300.0;
        for (const auto& t : thresholds) {
            double v = value(run.metrics, t.key);
            ok = ok && v >= t.min;
            line += " " + t.key + "=" + fixed(v) + (v >= t.min ? ">=" : "<") + fixed(t.min, 2);
        }
        line += " (" + fixed(run.seconds, 1) + "s)";
        o.pass = o.pass && ok;
        o.detail += (o.detail.empty() ? "" : "; ") + line;
        learningRuns.push_back(std::move(run));
    }
    return o;
}

Outcome constraintCompliance() {
    auto s = verify::mapCompliance(1000, 3);
    double consistency = std::nan("");
    for (const auto& run : learningRuns) {
        if (run.task == tasks::taskName(TaskId::MnistSum)) {
            consistency = value(run.metrics, "constrained_consistency");
        }
    }
    bool pass = s.passed() && s.instances >= 1000 && consistency == 1.0;
    return {pass, describe(s) + " (infeasible counted separately); mnist-sum constrained_consistency=" +
                          fixed(consistency)};
}

Outcome primalDual() {
    Outcome o{true, {}};
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto pd = RunConfig::defaults(TaskId::ToyNer);
        pd.seed = seed;
        pd.interplay = Interplay::PrimalDual;
        auto base = RunConfig::defaults(TaskId::ToyNer);
        base.seed = seed;
        base.conjunctionOnly = true;
        double vPd = value(tasks::runTask(pd).metrics, "violation_rate");
        double vBase = value(tasks::runTask(base).metrics, "violation_rate");
        o.pass = o.pass && vPd <= vBase;
        o.detail += (o.detail.empty() ? "" : "; ") + ("seed " + std::to_string(seed) + ": " + fixed(vPd) +
                                                             (vPd <= vBase ? "<=" : ">") + fixed(vBase));
    }
    o.detail = "violation rate primal-dual vs c1-only baseline, " + o.detail;
    return o;
}

std::filesystem::path workDir() {
    auto dir = std::filesystem::temp_directory_path() / ("nesy_acceptance_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    return dir;
}

Outcome benchReport() {
    auto dir = workDir();
    std::vector<RunConfig> configs;
    for (auto task : {TaskId::MnistSum, TaskId::Shapes, TaskId::ToyNer, TaskId::MathInference}) {
        auto c = RunConfig::defaults(task);
        c.epochs = 1;
        c.trainCount = 100;
        c.testCount = 50;
        configs.push_back(c);
    }
    auto result = cli::cmd_bench(configs, 5, dir);
    std::ifstream in(result.csv);
    std::stringstream text;
    text << in.rdbuf();
    auto parsed = cli::parseCsv(text.str());
    bool shape = result.records.size() == 4 && result.runs.size() == 20 && std::filesystem::exists(result.markdown);
    for (const auto& r : result.records) {
        shape = shape && r.runs == 5 && r.trainMsPerSample > 0 && r.testMsPerSample > 0 && r.peakMemMb > 0;
    }
    bool roundTrip = parsed == result.records && cli::toCsv(parsed) == text.str();
    std::filesystem::remove_all(dir);
    return {shape && roundTrip, std::to_string(result.records.size()) + " rows x " + std::to_string(5) +
                                        " runs, columns " + cli::kBenchColumns + "; csv round trip " +
                                        (roundTrip ? "exact" : "MISMATCH")};
}

Outcome parserRobustness(const std::filesystem::path& corpus) {
    auto s = verify::parserCorpus(corpus);
    return {s.passed() && s.instances >= 30, describe(s)};
}

/** Informational: per-sample reasoning time of top-1 proofs against exact extraction on MNIST Sum. */
std::string topOneNote() {
    double ms[2];
    int i = 0;
    for (auto spec : {provenance::SemiringSpec::topKGrad(1),
                 provenance::SemiringSpec::topKGrad(provenance::kUnboundedK)}) {
        auto c = RunConfig::defaults(TaskId::MnistSum);
        c.semiring = spec;
        c.epochs = 1;
        c.trainCount = 300;
        c.testCount = 100;
        ms[i++] = value(tasks::runTask(c).metrics, "train_reason_ms_per_sample");
    }
    return std::string(ms[0] <= ms[1] ? "as expected" : "NOT met (logged, not fatal)") +
           ": mnist-sum train reasoning ms/sample k=1 " + fixed(ms[0], 4) + " vs exact " + fixed(ms[1], 4);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: acceptance <parser-corpus-dir>\n";
        return 2;
    }
    std::filesystem::path corpus = argv[1];
    std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
            {"oracle equivalence", oracleEquivalence},
            {"gradient soundness", gradientSoundness},
            {"semiring laws", semiringLaws},
            {"normalization", normalization},
            {"shapes dataset fidelity", shapesFidelity},
            {"desk-scale learning", desktopLearning},
            {"constraint compliance", constraintCompliance},
            {"primal-dual behavior", primalDual},
            {"bench report", benchReport},
            {"parser robustness", [&] { return parserRobustness(corpus); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        Clock clock;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << " ["
                  << fixed(clock.seconds(), 1) << "s] " << o.detail << std::endl;
    }
    try {
        std::cout << "NOTE top-1 proofs vs exact " << topOneNote() << std::endl;
    } catch (const std::exception& e) {
        std::cout << "NOTE top-1 proofs vs exact not measured: " << e.what() << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
