#pragma once

#include "nesy/neural/tensor.h"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace nesy::tasks {

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/** A decoded IDX container of unsigned bytes. */
struct IdxData {
    std::uint32_t magic = 0;
    std::vector<std::size_t> dims;
    std::vector<std::uint8_t> payload;

    /** [N, rows, cols] scaled to [0,1]; ShapeMismatch for a label file. */
    neural::Tensor images() const;
    std::vector<int> labels() const;
};

/** Big-endian magic, dimension sizes, payload. Throws BadMagic, TruncatedPayload. */
IdxData parse_idx(const std::vector<std::uint8_t>& bytes);

std::vector<std::uint8_t> encodeIdxImages(std::size_t count, std::size_t rows, std::size_t cols,
        const std::vector<std::uint8_t>& pixels);
std::vector<std::uint8_t> encodeIdxLabels(const std::vector<int>& labels);

/** Whole-file IO; IoError names the path. */
std::vector<std::uint8_t> readFile(const std::filesystem::path& path);
void writeFile(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace nesy::tasks
