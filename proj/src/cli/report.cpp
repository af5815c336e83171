#include "nesy/cli/report.h"

#include "nesy/error.h"

#include <charconv>
#include <ctime>
#include <sstream>

namespace nesy::cli {

std::string formatDouble(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string utcTimestamp() {
    std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

std::vector<std::string> splitCsv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

double parseNumber(const std::string& text, std::size_t row) {
    double v = 0.0;
    auto r = std::from_chars(text.data(), text.data() + text.size(), v);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
        throw Error(ErrorCode::DataError, "bench row " + std::to_string(row) + ": '" + text + "' is not a number");
    }
    return v;
}

}  // namespace

std::string toCsv(const std::vector<BenchRecord>& records) {
    std::string out = std::string(kBenchColumns) + "\n";
    for (const auto& r : records) {
        out += r.task + "," + r.mode + "," + formatDouble(r.trainMsPerSample) + "," + formatDouble(r.testMsPerSample) +
               "," + formatDouble(r.peakMemMb) + "," + std::to_string(r.runs) + "\n";
    }
    return out;
}

std::vector<BenchRecord> parseCsv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kBenchColumns) {
        throw Error(ErrorCode::DataError, "bench CSV must start with the header " + std::string(kBenchColumns));
    }
    std::vector<BenchRecord> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        auto cells = splitCsv(line);
        if (cells.size() != 6) {
            throw Error(ErrorCode::DataError, "bench row " + std::to_string(row) + " needs 6 cells");
        }
        BenchRecord r;
        r.task = cells[0];
        r.mode = cells[1];
        r.trainMsPerSample = parseNumber(cells[2], row);
        r.testMsPerSample = parseNumber(cells[3], row);
        r.peakMemMb = parseNumber(cells[4], row);
        double runs = parseNumber(cells[5], row);
        if (runs < 0 || runs != static_cast<double>(static_cast<std::size_t>(runs))) {
            throw Error(ErrorCode::DataError, "bench row " + std::to_string(row) + ": runs must be a count");
        }
        r.runs = static_cast<std::size_t>(runs);
        out.push_back(r);
    }
    return out;
}

std::string toMarkdown(const std::vector<BenchRecord>& records) {
    std::ostringstream os;
    os << "Per-sample wall-clock times in milliseconds (monotonic clock around the sample loops), averaged over the "
          "listed runs. peak_mem_mb is the largest resident set size of the whole process sampled every 100 ms "
          "during a run (not allocator-exact), averaged over runs.\n\n";
    os << "| task | mode | train_ms_per_sample | test_ms_per_sample | peak_mem_mb | runs |\n";
    os << "|---|---|---:|---:|---:|---:|\n";
    char buf[128];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "| %.4f | %.4f | %.1f | %zu |\n", r.trainMsPerSample, r.testMsPerSample,
                r.peakMemMb, r.runs);
        os << "| " << r.task << " | " << r.mode << " " << buf;
    }
    return os.str();
}

BenchRecord summarize(const std::vector<BenchRun>& runs) {
    BenchRecord r;
    if (runs.empty()) {
        return r;
    }
    r.task = runs.front().task;
    r.mode = runs.front().mode;
    for (const auto& run : runs) {
        r.trainMsPerSample += run.trainMsPerSample;
        r.testMsPerSample += run.testMsPerSample;
        r.peakMemMb += run.peakMemMb;
    }
    double n = static_cast<double>(runs.size());
    r.trainMsPerSample /= n;
    r.testMsPerSample /= n;
    r.peakMemMb /= n;
    r.runs = runs.size();
    return r;
}

nlohmann::json toJson(const BenchRun& run) {
    return {{"task", run.task}, {"mode", run.mode}, {"seed", run.seed}, {"timestamp", run.timestamp},
            {"train_ms_per_sample", run.trainMsPerSample}, {"test_ms_per_sample", run.testMsPerSample},
            {"peak_mem_mb", run.peakMemMb}, {"metrics", run.metrics}};
}

std::string modeLabel(const tasks::RunConfig& config) {
    std::string mode = tasks::interplayName(config.interplay);
    if (config.interplay == tasks::Interplay::Reasoner || config.interplay == tasks::Interplay::PrimalDual) {
        mode += ":" + config.semiring.toString();
    }
    if (config.conjunctionOnly) {
        mode += ":conjunction-only";
    }
    return mode;
}

nlohmann::json metricsJson(const tasks::RunConfig& config, const tasks::Metrics& metrics) {
    nlohmann::json j;
    j["task"] = tasks::taskName(config.task);
    j["interplay"] = tasks::interplayName(config.interplay);
    j["semiring"] = config.semiring.toString();
    j["seed"] = config.seed;
    j["epochs"] = config.trainingEpochs();
    for (const auto& [k, v] : metrics.values) {
        j[k] = v;
    }
    j["train_ms_per_sample"] = metrics.trainMsPerSample;
    j["test_ms_per_sample"] = metrics.testMsPerSample;
    j["epoch_loss"] = metrics.epochLoss;
    if (config.interplay == tasks::Interplay::PrimalDual) {
        j["lambda"] = metrics.lambdas;
    }
    j["timestamp"] = utcTimestamp();
    return j;
}

}  // namespace nesy::cli
