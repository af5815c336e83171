#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace nesy::tasks {

/** One compact JSON document per line. Throws IoError. */
void writeJsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);

/** Skips blank lines; DataError names the offending line. */
std::vector<nlohmann::json> readJsonl(const std::filesystem::path& path);

[[noreturn]] void throwRecordError(const std::filesystem::path& path, std::size_t record, const std::string& what);

/** Runs `read`, turning JSON access errors into DataError naming the record. */
template <typename F>
auto decodeRecord(const std::filesystem::path& path, std::size_t record, F&& read) {
    try {
        return read();
    } catch (const nlohmann::json::exception& e) {
        throwRecordError(path, record, e.what());
    }
}

}  // namespace nesy::tasks
