#pragma once

#include "nesy/cli/report.h"
#include "nesy/error.h"
#include "nesy/tasks/common.h"
#include "nesy/verify/suites.h"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace nesy::cli {

enum ExitCode { kExitOk = 0, kExitConfig = 1, kExitData = 2, kExitInternal = 3 };

/** Exit code for an error escaping a command. */
ExitCode exitCodeFor(ErrorCode code);

struct GenResult {
    std::vector<std::filesystem::path> files;
    std::filesystem::path manifest;
};

/**
 * Writes the task's dataset under outDir (mnist: IDX files; shapes: PPM
 * images and shapes.jsonl; toy-ner, math: one JSONL file) and its manifest.
 * Sizes come from config.trainCount / testCount (shapes: their sum).
 */
GenResult cmd_gen(const tasks::RunConfig& config, const std::filesystem::path& outDir);

struct TrainResult {
    tasks::TaskResult result;
    std::filesystem::path metricsFile;
    std::vector<std::filesystem::path> checkpoints;
};

/** Trains, then writes <outDir>/<head>.nsyn per head, metrics.json and config.txt. */
TrainResult cmd_train(const tasks::RunConfig& config);

/** Evaluates the checkpoints in config.checkpointDir; writes <outDir>/eval_metrics.json. */
tasks::Metrics cmd_eval(const tasks::RunConfig& config);

struct BenchResult {
    std::vector<BenchRecord> records;
    std::vector<BenchRun> runs;
    std::filesystem::path csv;
    std::filesystem::path markdown;
};

/**
 * Runs every config `runs` times (seeds config.seed + r), timing the
 * train and test sample loops and sampling RSS every 100 ms, and writes
 * bench.csv, bench.md and bench_runs.jsonl into outDir.
 */
BenchResult cmd_bench(const std::vector<tasks::RunConfig>& configs, std::size_t runs, const std::filesystem::path& outDir,
        std::ostream* progress = nullptr);

struct GradcheckOptions {
    std::size_t instances = 1000;
    std::uint64_t seed = 1;
    verify::WmcGradFn wmcGrad = provenance::wmc_grad;
};

/** wmc_grad, network backward and soft-constraint loss gradients against central differences. */
std::vector<verify::SuiteResult> cmd_gradcheck(const GradcheckOptions& options = {});

}  // namespace nesy::cli
