#include "nesy/cli/commands.h"

#include "nesy/cli/manifest.h"
#include "nesy/cli/rss.h"
#include "nesy/cli/settings.h"
#include "nesy/error.h"
#include "nesy/tasks/idx.h"
#include "nesy/tasks/jsonl.h"
#include "nesy/tasks/math_inference.h"
#include "nesy/tasks/mnist_sum.h"
#include "nesy/tasks/shapes.h"
#include "nesy/tasks/toy_ner.h"

#include <ostream>

namespace nesy::cli {

using tasks::RunConfig;
using tasks::TaskId;

ExitCode exitCodeFor(ErrorCode code) {
    switch (code) {
    case ErrorCode::ConfigError:
        return kExitConfig;
    case ErrorCode::DataError:
    case ErrorCode::BadMagic:
    case ErrorCode::TruncatedPayload:
    case ErrorCode::IoError:
    case ErrorCode::BadCheckpoint:
        return kExitData;
    default:
        return kExitInternal;
    }
}

namespace {

void makeDirectory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error(ErrorCode::IoError, "cannot create directory " + dir.string() + ": " + ec.message(), dir.string());
    }
}

void writeText(const std::filesystem::path& path, const std::string& text) {
    tasks::writeFile(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::vector<std::filesystem::path> writeDigits(const tasks::DigitSet& set, const std::filesystem::path& images,
        const std::filesystem::path& labels) {
    tasks::writeFile(images, tasks::encodeIdxImages(set.size(), tasks::kDigitSide, tasks::kDigitSide, set.pixels));
    tasks::writeFile(labels, tasks::encodeIdxLabels(set.labels));
    return {images, labels};
}

}  // namespace

GenResult cmd_gen(const RunConfig& config, const std::filesystem::path& outDir) {
    makeDirectory(outDir);
    GenResult out;
    switch (config.task) {
    case TaskId::MnistSum: {
        RunConfig synthetic = config;
        synthetic.dataDir.clear();
        auto data = tasks::loadMnistData(synthetic);
        out.files = writeDigits(data.train.digits, outDir / tasks::kMnistTrainImages, outDir / tasks::kMnistTrainLabels);
        auto test = writeDigits(data.test.digits, outDir / tasks::kMnistTestImages, outDir / tasks::kMnistTestLabels);
        out.files.insert(out.files.end(), test.begin(), test.end());
        break;
    }
    case TaskId::Shapes:
        out.files = tasks::writeShapes(tasks::gen_shapes(config.seed, config.trainCount + config.testCount), outDir);
        break;
    case TaskId::ToyNer:
        out.files = tasks::writeNer(tasks::gen_toy_ner(config.seed, config.trainCount, config.testCount), outDir);
        break;
    case TaskId::MathInference:
        out.files = tasks::writeMath(
                {tasks::gen_math(config.seed, config.trainCount), tasks::gen_math(config.seed + 7919, config.testCount)},
                outDir);
        break;
    }
    out.manifest = writeManifest(outDir, buildManifest(outDir, out.files));
    return out;
}

TrainResult cmd_train(const RunConfig& config) {
    config.validate();
    makeDirectory(config.outDir);
    TrainResult out;
    out.result = tasks::runTask(config);
    for (const auto& net : out.result.heads) {
        auto path = config.outDir / (net.headId() + ".nsyn");
        net.save(path);
        out.checkpoints.push_back(path);
    }
    out.metricsFile = config.outDir / "metrics.json";
    writeText(out.metricsFile, metricsJson(config, out.result.metrics).dump(2) + "\n");
    writeText(config.outDir / "config.txt", formatSettings(toSettings(config)));
    return out;
}

tasks::Metrics cmd_eval(const RunConfig& config) {
    if (config.checkpointDir.empty()) {
        throw Error(ErrorCode::ConfigError, "eval needs a checkpoint directory", "checkpoint_dir");
    }
    RunConfig c = config;
    c.evaluateOnly = true;
    c.validate();
    makeDirectory(c.outDir);
    auto result = tasks::runTask(c);
    writeText(c.outDir / "eval_metrics.json", metricsJson(c, result.metrics).dump(2) + "\n");
    return result.metrics;
}

BenchResult cmd_bench(const std::vector<RunConfig>& configs, std::size_t runs, const std::filesystem::path& outDir,
        std::ostream* progress) {
    if (runs == 0) {
        throw Error(ErrorCode::ConfigError, "bench needs at least one run", "runs");
    }
    for (const auto& c : configs) {
        c.validate();
    }
    makeDirectory(outDir);
    BenchResult out;
    std::vector<nlohmann::json> details;
    for (const auto& base : configs) {
        std::vector<BenchRun> group;
        for (std::size_t r = 0; r < runs; ++r) {
            RunConfig c = base;
            c.seed = base.seed + r;
            RssSampler sampler;
            auto result = tasks::runTask(c);
            BenchRun run;
            run.peakMemMb = sampler.stop();
            run.task = tasks::taskName(c.task);
            run.mode = modeLabel(c);
            run.seed = c.seed;
            run.timestamp = utcTimestamp();
            run.trainMsPerSample = result.metrics.trainMsPerSample;
            run.testMsPerSample = result.metrics.testMsPerSample;
            run.metrics = result.metrics.values;
            if (progress) {
                *progress << run.task << " " << run.mode << " run " << r + 1 << "/" << runs << ": train "
                          << run.trainMsPerSample << " ms/sample, test " << run.testMsPerSample << " ms/sample, peak "
                          << run.peakMemMb << " MB\n";
            }
            details.push_back(toJson(run));
            out.runs.push_back(run);
            group.push_back(std::move(run));
        }
        out.records.push_back(summarize(group));
    }
    out.csv = outDir / "bench.csv";
    out.markdown = outDir / "bench.md";
    writeText(out.csv, toCsv(out.records));
    writeText(out.markdown, toMarkdown(out.records));
    tasks::writeJsonl(outDir / "bench_runs.jsonl", details);
    return out;
}

std::vector<verify::SuiteResult> cmd_gradcheck(const GradcheckOptions& options) {
    return {verify::wmcGradients(options.instances, options.seed, options.wmcGrad),
            verify::networkGradients(options.instances, options.seed),
            verify::softLossGradients(options.instances, options.seed)};
}

}  // namespace nesy::cli
