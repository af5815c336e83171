#include "nesy/cli/commands.h"
#include "nesy/cli/settings.h"
#include "nesy/error.h"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

using namespace nesy;
using namespace nesy::cli;

namespace {

/** Flags shared by gen, train, eval and bench; only flags actually given override the config file. */
struct CommonFlags {
    std::map<std::string, std::string> given;
    std::string configFile;

    void attach(CLI::App* cmd, bool withTask) {
        if (withTask) {
            option(cmd, "--task", "task", "mnist-sum | shapes | toy-ner | math");
        }
        option(cmd, "--semiring", "semiring", "topk:K | exact | maxmin | addmult | bool");
        option(cmd, "--interplay", "interplay", "reasoner | soft-constraint | sampling | primal-dual");
        option(cmd, "--seed", "seed", "random seed");
        option(cmd, "--epochs", "epochs", "training epochs");
        option(cmd, "--batch-size", "batch_size", "samples per optimizer step");
        option(cmd, "--lr", "lr", "Adam learning rate");
        option(cmd, "--train-count", "train_count", "training samples (pairs for mnist-sum)");
        option(cmd, "--test-count", "test_count", "test samples");
        option(cmd, "--eta", "eta", "dual step size for primal-dual");
        option(cmd, "--samples", "samples", "samples per example for the sampling loss");
        option(cmd, "--data", "data_dir", "dataset directory written by gen (default: generate in memory)");
        option(cmd, "--out", "out_dir", "output directory");
        cmd->add_flag_callback("--conjunction-only", [this] { given["conjunction_only"] = "true"; },
                "toy-ner: supervise only the first constraint");
        cmd->add_option("--config", configFile, "key = value settings file (flags take precedence)");
    }

    void option(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(flag, [this, key](const std::string& v) { given[key] = v; }, help);
    }

    tasks::RunConfig resolve() const {
        std::map<std::string, std::string> settings;
        if (!configFile.empty()) {
            settings = readSettings(configFile);
        }
        for (const auto& [k, v] : given) {
            settings[k] = v;
        }
        tasks::RunConfig config;
        if (!settings.count("task")) {
            settings["task"] = tasks::taskName(config.task);
        }
        applySettings(config, settings);
        return config;
    }
};

std::vector<std::string> splitList(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

void printSuites(const std::vector<verify::SuiteResult>& suites) {
    for (const auto& s : suites) {
        std::printf("%-16s instances=%zu excluded=%zu max_rel_err=%.3e tol=%.0e %s\n", s.name.c_str(), s.instances,
                s.excluded, s.maxError, verify::kGradientTolerance, s.passed() ? "PASS" : "FAIL");
        if (!s.passed() && !s.firstFailure.empty()) {
            std::printf("  first failure: %s\n", s.firstFailure.c_str());
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neurosymbolic toolkit: datasets, training, evaluation and benchmarks"};
    app.require_subcommand(1);

    CommonFlags genFlags;
    CommonFlags trainFlags;
    CommonFlags evalFlags;
    CommonFlags benchFlags;
    auto* gen = app.add_subcommand("gen", "generate a task dataset with a checksum manifest");
    genFlags.attach(gen, true);
    auto* train = app.add_subcommand("train", "train a task; writes checkpoints and metrics.json");
    trainFlags.attach(train, true);
    auto* eval = app.add_subcommand("eval", "evaluate saved checkpoints on the test split");
    evalFlags.attach(eval, true);
    std::string checkpointDir;
    eval->add_option("--checkpoint", checkpointDir, "directory holding <head>.nsyn files")->required();
    auto* bench = app.add_subcommand("bench", "time tasks and write bench.csv / bench.md");
    benchFlags.attach(bench, false);
    std::string benchTasks = "mnist-sum,shapes,toy-ner,math";
    std::string benchModes = "reasoner";
    std::size_t runs = 5;
    bench->add_option("--tasks", benchTasks, "comma-separated tasks")->capture_default_str();
    bench->add_option("--modes", benchModes, "comma-separated interplay modes")->capture_default_str();
    bench->add_option("--runs", runs, "runs per (task, mode), seeds seed..seed+runs-1")->capture_default_str();
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference checks of every analytic gradient");
    GradcheckOptions gradOptions;
    gradcheck->add_option("--instances", gradOptions.instances, "random instances per suite")->capture_default_str();
    gradcheck->add_option("--seed", gradOptions.seed, "random seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (gen->parsed()) {
            auto config = genFlags.resolve();
            auto result = cmd_gen(config, config.outDir);
            std::cout << "wrote " << result.files.size() << " files and " << result.manifest.string() << "\n";
        } else if (train->parsed()) {
            auto result = cmd_train(trainFlags.resolve());
            std::cout << metricsJson(trainFlags.resolve(), result.result.metrics).dump(2) << "\n";
            std::cout << "metrics: " << result.metricsFile.string() << "\n";
        } else if (eval->parsed()) {
            auto config = evalFlags.resolve();
            config.checkpointDir = checkpointDir;
            auto metrics = cmd_eval(config);
            config.evaluateOnly = true;
            std::cout << metricsJson(config, metrics).dump(2) << "\n";
        } else if (bench->parsed()) {
            auto base = benchFlags.resolve();
            std::vector<tasks::RunConfig> configs;
            for (const auto& t : splitList(benchTasks)) {
                for (const auto& m : splitList(benchModes)) {
                    auto settings = benchFlags.given;
                    if (!benchFlags.configFile.empty()) {
                        for (const auto& [k, v] : readSettings(benchFlags.configFile)) {
                            settings.emplace(k, v);
                        }
                    }
                    settings["task"] = t;
                    settings["interplay"] = m;
                    tasks::RunConfig c;
                    applySettings(c, settings);
                    configs.push_back(c);
                }
            }
            auto result = cmd_bench(configs, runs, base.outDir, &std::cerr);
            std::cout << toMarkdown(result.records);
            std::cout << "csv: " << result.csv.string() << "\n";
        } else if (gradcheck->parsed()) {
            auto suites = cmd_gradcheck(gradOptions);
            printSuites(suites);
            for (const auto& s : suites) {
                if (!s.passed()) {
                    return kExitInternal;
                }
            }
        }
    } catch (const Error& e) {
        std::cerr << "error [" << errorCodeName(e.code()) << "]: " << e.what() << "\n";
        return exitCodeFor(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
