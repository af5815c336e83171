#include "nesy/cli/manifest.h"

#include "nesy/error.h"
#include "nesy/tasks/idx.h"
#include "nesy/tasks/jsonl.h"

#include <openssl/evp.h>

#include <algorithm>

namespace nesy::cli {

std::string sha256Hex(const std::vector<std::uint8_t>& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::IoError, "SHA-256 computation failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::vector<ManifestEntry> buildManifest(const std::filesystem::path& root,
        const std::vector<std::filesystem::path>& files) {
    std::vector<ManifestEntry> out;
    for (const auto& f : files) {
        auto bytes = tasks::readFile(f);
        ManifestEntry e;
        e.path = std::filesystem::relative(f, root).generic_string();
        e.bytes = bytes.size();
        e.checksum = "sha256:" + sha256Hex(bytes);
        out.push_back(std::move(e));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
    return out;
}

std::filesystem::path writeManifest(const std::filesystem::path& root, const std::vector<ManifestEntry>& entries) {
    std::vector<nlohmann::json> records;
    for (const auto& e : entries) {
        records.push_back({{"path", e.path}, {"bytes", e.bytes}, {"checksum", e.checksum}});
    }
    auto path = root / kManifestName;
    tasks::writeJsonl(path, records);
    return path;
}

std::vector<ManifestEntry> readManifest(const std::filesystem::path& root) {
    auto path = root / kManifestName;
    auto records = tasks::readJsonl(path);
    std::vector<ManifestEntry> out;
    for (std::size_t r = 0; r < records.size(); ++r) {
        out.push_back(tasks::decodeRecord(path, r + 1, [&] {
            ManifestEntry e;
            e.path = records[r].at("path").get<std::string>();
            e.bytes = records[r].at("bytes").get<std::uint64_t>();
            e.checksum = records[r].at("checksum").get<std::string>();
            return e;
        }));
    }
    return out;
}

}  // namespace nesy::cli
