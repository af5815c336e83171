#include "doctest.h"

#include "nesy/cli/commands.h"
#include "nesy/cli/manifest.h"
#include "nesy/cli/report.h"
#include "nesy/cli/rss.h"
#include "nesy/cli/settings.h"
#include "nesy/error.h"
#include "nesy/tasks/idx.h"
#include "nesy/tasks/shapes.h"

#include <functional>
#include <random>
#include <thread>
#include <unistd.h>

using namespace nesy;
using namespace nesy::cli;

namespace {

ErrorCode codeOf(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::DataError;
}

std::filesystem::path scratchDir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("nesy_cli_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    return dir;
}

std::string readText(const std::filesystem::path& p) {
    auto bytes = tasks::readFile(p);
    return std::string(bytes.begin(), bytes.end());
}

tasks::RunConfig tiny(tasks::TaskId task, const std::filesystem::path& out) {
    auto c = tasks::RunConfig::defaults(task);
    c.trainCount = 20;
    c.testCount = 10;
    c.epochs = 1;
    c.outDir = out;
    return c;
}

}  // namespace

TEST_CASE("settings text parses keys, values and comments") {
    auto s = parseSettings("# run\ntask = shapes\n  epochs=3  # short\n\nlr = 0.01\n");
    CHECK(s.size() == 3);
    CHECK(s.at("task") == "shapes");
    CHECK(s.at("epochs") == "3");
    CHECK(s.at("lr") == "0.01");
    CHECK(codeOf([] { parseSettings("epochs 3\n"); }) == ErrorCode::ConfigError);
    CHECK(codeOf([] { parseSettings("epochs = 3\nepochs = 4\n"); }) == ErrorCode::ConfigError);
}

TEST_CASE("settings apply task defaults first, then overrides") {
    tasks::RunConfig c;
    applySettings(c, {{"epochs", "7"}, {"task", "toy-ner"}, {"interplay", "primal-dual"}, {"semiring", "topk:5"}});
    CHECK(c.task == tasks::TaskId::ToyNer);
    CHECK(c.epochs == 7);
    CHECK(c.interplay == tasks::Interplay::PrimalDual);
    CHECK(c.semiring.k == 5);
    CHECK(c.trainCount == tasks::RunConfig::defaults(tasks::TaskId::ToyNer).trainCount);
    CHECK(codeOf([&] { applySettings(c, {{"bogus", "1"}}); }) == ErrorCode::ConfigError);
    CHECK(codeOf([&] { applySettings(c, {{"epochs", "three"}}); }) == ErrorCode::ConfigError);
    CHECK(codeOf([&] { applySettings(c, {{"epochs", "-2"}}); }) == ErrorCode::ConfigError);
    CHECK(codeOf([&] { applySettings(c, {{"semiring", "topk:0"}}); }) == ErrorCode::ConfigError);
}

TEST_CASE("settings round trip through text") {
    auto c = tasks::RunConfig::defaults(tasks::TaskId::Shapes);
    c.lr = 0.0123;
    c.seed = 42;
    c.dataDir = "data/shapes";
    c.conjunctionOnly = true;
    tasks::RunConfig back;
    applySettings(back, parseSettings(formatSettings(toSettings(c))));
    CHECK(toSettings(back) == toSettings(c));
    CHECK(back.lr == c.lr);
}

TEST_CASE("csv report round trips exactly") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<BenchRecord> records;
        for (int r = 0; r < 1 + trial % 5; ++r) {
            records.push_back({"task" + std::to_string(r), "reasoner:topk:" + std::to_string(r), u(rng), u(rng) / 7.0,
                    u(rng) * 1e-3, static_cast<std::size_t>(rng() % 10)});
        }
        CHECK(parseCsv(toCsv(records)) == records);
    }
    CHECK(codeOf([] { parseCsv("task,mode\n"); }) == ErrorCode::DataError);
    CHECK(codeOf([] { parseCsv(std::string(kBenchColumns) + "\nx,y,1,2,z,5\n"); }) == ErrorCode::DataError);
}

TEST_CASE("csv header has exactly the report columns") {
    auto csv = toCsv({{"math", "reasoner:exact", 1.5, 0.25, 10, 5}});
    CHECK(csv.rfind("task,mode,train_ms_per_sample,test_ms_per_sample,peak_mem_mb,runs\n", 0) == 0);
    CHECK(csv.find("math,reasoner:exact,1.5,0.25,10,5\n") != std::string::npos);
    CHECK(toMarkdown({{"math", "reasoner:exact", 1.5, 0.25, 10, 5}}).find("| math | reasoner:exact |") !=
            std::string::npos);
}

TEST_CASE("summaries average the runs") {
    std::vector<BenchRun> runs(2);
    runs[0].task = runs[1].task = "math";
    runs[0].mode = runs[1].mode = "reasoner:exact";
    runs[0].trainMsPerSample = 1.0;
    runs[1].trainMsPerSample = 3.0;
    runs[0].peakMemMb = 10;
    runs[1].peakMemMb = 20;
    auto r = summarize(runs);
    CHECK(r.trainMsPerSample == 2.0);
    CHECK(r.peakMemMb == 15.0);
    CHECK(r.runs == 2);
}

TEST_CASE("sha256 of known inputs") {
    CHECK(sha256Hex({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256Hex({'a', 'b', 'c'}) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("rss sampler records the process") {
    RssSampler sampler(std::chrono::milliseconds(10));
    std::vector<double> ballast(4'000'000, 1.0);
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    double peak = sampler.stop();
    CHECK(ballast[123] == 1.0);
    CHECK(peak > 0.0);
    CHECK(sampler.samples() >= 3);
    CHECK(currentRssMb() > 0.0);
}

TEST_CASE("exit codes") {
    CHECK(exitCodeFor(ErrorCode::ConfigError) == 1);
    CHECK(exitCodeFor(ErrorCode::DataError) == 2);
    CHECK(exitCodeFor(ErrorCode::BadMagic) == 2);
    CHECK(exitCodeFor(ErrorCode::IoError) == 2);
    CHECK(exitCodeFor(ErrorCode::ShapeMismatch) == 3);
}

TEST_CASE("gen writes a manifest that is identical across runs") {
    auto dir = scratchDir("gen");
    auto c = tasks::RunConfig::defaults(tasks::TaskId::Shapes);
    c.trainCount = 6;
    c.testCount = 6;
    auto a = cmd_gen(c, dir / "a");
    auto b = cmd_gen(c, dir / "b");
    CHECK(a.files.size() == 13);
    CHECK(readText(a.manifest) == readText(b.manifest));
    auto entries = readManifest(dir / "a");
    CHECK(entries.size() == 13);
    for (const auto& e : entries) {
        auto bytes = tasks::readFile(dir / "a" / e.path);
        CHECK(e.bytes == bytes.size());
        CHECK(e.checksum == "sha256:" + sha256Hex(bytes));
    }
    auto back = tasks::readShapes(dir / "a");
    CHECK(back.train.size() == 6);
    std::filesystem::remove_all(dir);
}

TEST_CASE("gen into an unwritable location names the path") {
    auto dir = scratchDir("blocked");
    tasks::writeFile(dir.string() + "_file", {1});
    auto blocked = std::filesystem::path(dir.string() + "_file") / "sub";
    try {
        cmd_gen(tasks::RunConfig::defaults(tasks::TaskId::MathInference), blocked);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
        CHECK(std::string(e.what()).find(blocked.string()) != std::string::npos);
    }
    std::filesystem::remove(dir.string() + "_file");
}

TEST_CASE("train then eval every task from generated files") {
    auto dir = scratchDir("train");
    for (auto task : {tasks::TaskId::MnistSum, tasks::TaskId::Shapes, tasks::TaskId::ToyNer,
                 tasks::TaskId::MathInference}) {
        auto name = tasks::taskName(task);
        auto c = tiny(task, dir / (name + "_run"));
        cmd_gen(c, dir / name);
        c.dataDir = dir / name;
        auto trained = cmd_train(c);
        CHECK(std::filesystem::exists(trained.metricsFile));
        CHECK_FALSE(trained.checkpoints.empty());
        auto metrics = nlohmann::json::parse(readText(trained.metricsFile));
        CHECK(metrics.contains("train_ms_per_sample"));
        CHECK(metrics.contains("test_ms_per_sample"));
        c.checkpointDir = c.outDir;
        c.outDir = dir / (name + "_eval");
        auto evaluated = cmd_eval(c);
        for (const auto& [k, v] : trained.result.metrics.values) {
            if (k.find("_ms_") == std::string::npos) {
                CHECK_MESSAGE(evaluated.values.at(k) == doctest::Approx(v), name << " " << k);
            }
        }
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("metrics schema") {
    auto dir = scratchDir("schema");
    auto mnist = cmd_train(tiny(tasks::TaskId::MnistSum, dir / "mnist"));
    auto m = nlohmann::json::parse(readText(mnist.metricsFile));
    CHECK(m.contains("sum_accuracy"));
    CHECK(m.contains("digit_accuracy"));
    auto ner = tiny(tasks::TaskId::ToyNer, dir / "ner");
    ner.interplay = tasks::Interplay::PrimalDual;
    auto n = nlohmann::json::parse(readText(cmd_train(ner).metricsFile));
    CHECK(n.at("lambda").contains("constraint1"));
    CHECK(n.at("lambda").contains("constraint2"));
    auto bad = tiny(tasks::TaskId::MnistSum, dir / "bad");
    bad.semiring.k = 0;
    CHECK(codeOf([&] { cmd_train(bad); }) == ErrorCode::ConfigError);
    CHECK_FALSE(std::filesystem::exists(dir / "bad" / "metrics.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("bench writes one row per task and mode") {
    auto dir = scratchDir("bench");
    std::vector<tasks::RunConfig> configs{tiny(tasks::TaskId::MathInference, dir),
            tiny(tasks::TaskId::ToyNer, dir)};
    configs[1].interplay = tasks::Interplay::SoftConstraint;
    auto result = cmd_bench(configs, 2, dir);
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].task == "math");
    CHECK(result.records[1].mode == "soft-constraint");
    CHECK(result.records[0].runs == 2);
    CHECK(result.runs.size() == 4);
    CHECK(parseCsv(readText(result.csv)) == result.records);
    CHECK(result.records[0].peakMemMb > 0.0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("gradcheck passes and catches a sign flip") {
    GradcheckOptions options;
    options.instances = 200;
    for (const auto& s : cmd_gradcheck(options)) {
        CHECK_MESSAGE(s.passed(), s.name << ": " << s.firstFailure);
        CHECK(s.maxError < verify::kGradientTolerance);
    }
    options.wmcGrad = [](const provenance::ProofSet& proofs, const provenance::FactWeights& w) {
        auto g = provenance::wmc_grad(proofs, w);
        for (auto& [fact, d] : g.grad) {
            d = -d;
        }
        for (auto& [group, d] : g.rest) {
            d = -d;
        }
        return g;
    };
    auto mutated = cmd_gradcheck(options);
    CHECK_FALSE(mutated[0].passed());
}
