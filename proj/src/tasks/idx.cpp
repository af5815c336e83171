#include "nesy/tasks/idx.h"

#include "nesy/error.h"

#include <fstream>
#include <iterator>

namespace nesy::tasks {

namespace {

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t at) {
    return (static_cast<std::uint32_t>(b[at]) << 24) | (static_cast<std::uint32_t>(b[at + 1]) << 16) |
           (static_cast<std::uint32_t>(b[at + 2]) << 8) | b[at + 3];
}

void putBe32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) {
        out.push_back(static_cast<std::uint8_t>(v >> s));
    }
}

}  // namespace

IdxData parse_idx(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 4) {
        throw Error(ErrorCode::TruncatedPayload, "IDX header shorter than 4 bytes");
    }
    IdxData out;
    out.magic = be32(bytes, 0);
    if (out.magic != kIdxImagesMagic && out.magic != kIdxLabelsMagic) {
        char hex[16];
        std::snprintf(hex, sizeof hex, "0x%08x", out.magic);
        throw Error(ErrorCode::BadMagic, std::string("unsupported IDX magic ") + hex);
    }
    std::size_t rank = out.magic & 0xff;
    if (bytes.size() < 4 + 4 * rank) {
        throw Error(ErrorCode::TruncatedPayload, "IDX dimension header truncated");
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < rank; ++i) {
        out.dims.push_back(be32(bytes, 4 + 4 * i));
        total *= out.dims.back();
    }
    std::size_t start = 4 + 4 * rank;
    if (bytes.size() - start < total) {
        throw Error(ErrorCode::TruncatedPayload, "IDX payload has " + std::to_string(bytes.size() - start) +
                                                         " bytes, header announces " + std::to_string(total));
    }
    if (bytes.size() - start > total) {
        throw Error(ErrorCode::DataError, "IDX payload has trailing bytes");
    }
    out.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(start), bytes.end());
    return out;
}

neural::Tensor IdxData::images() const {
    if (magic != kIdxImagesMagic) {
        throw Error(ErrorCode::ShapeMismatch, "IDX file does not hold images");
    }
    std::vector<double> data(payload.size());
    for (std::size_t i = 0; i < payload.size(); ++i) {
        data[i] = payload[i] / 255.0;
    }
    return neural::Tensor::from(dims, std::move(data));
}

std::vector<int> IdxData::labels() const {
    if (magic != kIdxLabelsMagic) {
        throw Error(ErrorCode::ShapeMismatch, "IDX file does not hold labels");
    }
    return {payload.begin(), payload.end()};
}

std::vector<std::uint8_t> encodeIdxImages(std::size_t count, std::size_t rows, std::size_t cols,
        const std::vector<std::uint8_t>& pixels) {
    if (pixels.size() != count * rows * cols) {
        throw Error(ErrorCode::ShapeMismatch, "pixel count does not match image dimensions");
    }
    std::vector<std::uint8_t> out;
    putBe32(out, kIdxImagesMagic);
    putBe32(out, static_cast<std::uint32_t>(count));
    putBe32(out, static_cast<std::uint32_t>(rows));
    putBe32(out, static_cast<std::uint32_t>(cols));
    out.insert(out.end(), pixels.begin(), pixels.end());
    return out;
}

std::vector<std::uint8_t> encodeIdxLabels(const std::vector<int>& labels) {
    std::vector<std::uint8_t> out;
    putBe32(out, kIdxLabelsMagic);
    putBe32(out, static_cast<std::uint32_t>(labels.size()));
    for (int l : labels) {
        out.push_back(static_cast<std::uint8_t>(l));
    }
    return out;
}

std::vector<std::uint8_t> readFile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path.string(), path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void writeFile(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path.string(), path.string());
    }
}

}  // namespace nesy::tasks
