#include "nesy/cli/settings.h"

#include "nesy/cli/report.h"
#include "nesy/error.h"
#include "nesy/tasks/idx.h"

#include <sstream>

namespace nesy::cli {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void badValue(const std::string& key, const std::string& value, const std::string& expected) {
    throw Error(ErrorCode::ConfigError, "setting " + key + " = '" + value + "': expected " + expected, key);
}

std::size_t toCount(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        if (!value.empty() && value[0] == '-') {
            badValue(key, value, "a positive integer");
        }
        unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) {
            badValue(key, value, "a positive integer");
        }
        return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
        badValue(key, value, "a positive integer");
    }
}

double toReal(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) {
            badValue(key, value, "a number");
        }
        return v;
    } catch (const std::logic_error&) {
        badValue(key, value, "a number");
    }
}

bool toBool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    badValue(key, value, "true or false");
}

}  // namespace

std::map<std::string, std::string> parseSettings(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (trim(line).empty()) {
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineNo) + ": expected key = value",
                    trim(line), lineNo);
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineNo) + ": empty key", "", lineNo);
        }
        if (!out.emplace(key, value).second) {
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineNo) + ": repeated key " + key, key,
                    lineNo);
        }
    }
    return out;
}

std::map<std::string, std::string> readSettings(const std::filesystem::path& path) {
    auto bytes = tasks::readFile(path);
    return parseSettings(std::string(bytes.begin(), bytes.end()));
}

void applySettings(tasks::RunConfig& config, const std::map<std::string, std::string>& settings) {
    auto task = settings.find("task");
    if (task != settings.end()) {
        config = tasks::RunConfig::defaults(tasks::parseTask(task->second));
    }
    for (const auto& [key, value] : settings) {
        if (key == "task") {
            continue;
        } else if (key == "semiring") {
            config.semiring = provenance::SemiringSpec::parse(value);
        } else if (key == "interplay") {
            config.interplay = tasks::parseInterplay(value);
        } else if (key == "epochs") {
            config.epochs = toCount(key, value);
        } else if (key == "batch_size") {
            config.batchSize = toCount(key, value);
        } else if (key == "lr") {
            config.lr = toReal(key, value);
        } else if (key == "seed") {
            config.seed = toCount(key, value);
        } else if (key == "data_dir") {
            config.dataDir = value;
        } else if (key == "out_dir") {
            config.outDir = value;
        } else if (key == "checkpoint_dir") {
            config.checkpointDir = value;
        } else if (key == "train_count") {
            config.trainCount = toCount(key, value);
        } else if (key == "test_count") {
            config.testCount = toCount(key, value);
        } else if (key == "eta") {
            config.eta = toReal(key, value);
        } else if (key == "samples") {
            config.samples = toCount(key, value);
        } else if (key == "conjunction_only") {
            config.conjunctionOnly = toBool(key, value);
        } else {
            throw Error(ErrorCode::ConfigError, "unknown setting '" + key + "'", key);
        }
    }
}

std::map<std::string, std::string> toSettings(const tasks::RunConfig& c) {
    std::map<std::string, std::string> out{
            {"task", tasks::taskName(c.task)},
            {"semiring", c.semiring.toString()},
            {"interplay", tasks::interplayName(c.interplay)},
            {"epochs", std::to_string(c.epochs)},
            {"batch_size", std::to_string(c.batchSize)},
            {"lr", formatDouble(c.lr)},
            {"seed", std::to_string(c.seed)},
            {"out_dir", c.outDir.string()},
            {"train_count", std::to_string(c.trainCount)},
            {"test_count", std::to_string(c.testCount)},
            {"eta", formatDouble(c.eta)},
            {"samples", std::to_string(c.samples)},
            {"conjunction_only", c.conjunctionOnly ? "true" : "false"},
    };
    if (!c.dataDir.empty()) {
        out["data_dir"] = c.dataDir.string();
    }
    if (!c.checkpointDir.empty()) {
        out["checkpoint_dir"] = c.checkpointDir.string();
    }
    return out;
}

std::string formatSettings(const std::map<std::string, std::string>& settings) {
    std::string out;
    for (const auto& [k, v] : settings) {
        out += k + " = " + v + "\n";
    }
    return out;
}

}  // namespace nesy::cli
