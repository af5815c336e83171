#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nesy::cli {

inline constexpr const char* kManifestName = "manifest.jsonl";

std::string sha256Hex(const std::vector<std::uint8_t>& bytes);

struct ManifestEntry {
    /** Relative to the dataset root, '/' separated. */
    std::string path;
    std::uint64_t bytes = 0;
    /** "sha256:<hex>". */
    std::string checksum;
};

/** Entries for `files`, sorted by path. Throws IoError. */
std::vector<ManifestEntry> buildManifest(const std::filesystem::path& root, const std::vector<std::filesystem::path>& files);
/** Writes <root>/manifest.jsonl, one {path, bytes, checksum} object per line. */
std::filesystem::path writeManifest(const std::filesystem::path& root, const std::vector<ManifestEntry>& entries);
std::vector<ManifestEntry> readManifest(const std::filesystem::path& root);

}  // namespace nesy::cli
