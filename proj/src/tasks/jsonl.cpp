#include "nesy/tasks/jsonl.h"

#include "nesy/error.h"
#include "nesy/tasks/idx.h"

#include <sstream>

namespace nesy::tasks {

void writeJsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records) {
    std::string text;
    for (const auto& r : records) {
        text += r.dump() + "\n";
    }
    writeFile(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::vector<nlohmann::json> readJsonl(const std::filesystem::path& path) {
    auto bytes = readFile(path);
    std::istringstream in(std::string(bytes.begin(), bytes.end()));
    std::vector<nlohmann::json> out;
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            out.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::DataError, path.string() + ":" + std::to_string(lineNo) + ": " + e.what(),
                    path.string(), static_cast<int>(lineNo));
        }
    }
    return out;
}

void throwRecordError(const std::filesystem::path& path, std::size_t record, const std::string& what) {
    throw Error(ErrorCode::DataError, path.string() + ": record " + std::to_string(record) + ": " + what,
            path.string(), static_cast<int>(record));
}

}  // namespace nesy::tasks
