#pragma once

#include "nesy/tasks/common.h"

#include <json.hpp>

#include <string>
#include <vector>

namespace nesy::cli {

/** One row of the efficiency table, averaged over `runs` runs. */
struct BenchRecord {
    std::string task;
    std::string mode;
    double trainMsPerSample = 0.0;
    double testMsPerSample = 0.0;
    double peakMemMb = 0.0;
    std::size_t runs = 0;

    bool operator==(const BenchRecord&) const = default;
};

/** Per-run details kept next to the table. */
struct BenchRun {
    std::string task;
    std::string mode;
    std::uint64_t seed = 0;
    std::string timestamp;
    double trainMsPerSample = 0.0;
    double testMsPerSample = 0.0;
    double peakMemMb = 0.0;
    std::map<std::string, double> metrics;
};

inline constexpr const char* kBenchColumns = "task,mode,train_ms_per_sample,test_ms_per_sample,peak_mem_mb,runs";

/** Header plus one line per record; numbers use shortest round-trip text. */
std::string toCsv(const std::vector<BenchRecord>& records);
/** Inverse of toCsv. Throws DataError on a wrong header or malformed row. */
std::vector<BenchRecord> parseCsv(const std::string& text);
/** Markdown table with the same columns and a note on how memory is measured. */
std::string toMarkdown(const std::vector<BenchRecord>& records);

/** Averages runs of one (task, mode) pair. */
BenchRecord summarize(const std::vector<BenchRun>& runs);

nlohmann::json toJson(const BenchRun& run);

/** "interplay" or "interplay:semiring", e.g. reasoner:topk:3. */
std::string modeLabel(const tasks::RunConfig& config);

/** Metrics file content for one run. */
nlohmann::json metricsJson(const tasks::RunConfig& config, const tasks::Metrics& metrics);

/** Shortest decimal text that parses back to the same double. */
std::string formatDouble(double v);

/** Current UTC time, ISO 8601. */
std::string utcTimestamp();

}  // namespace nesy::cli
