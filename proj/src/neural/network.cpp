#include "nesy/neural/network.h"

#include "nesy/error.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>

namespace nesy::neural {

namespace {

Tensor linearForward(const Layer& l, const Tensor& x) {
    std::size_t rows = x.rows();
    std::vector<std::size_t> shape = x.shape();
    shape.back() = l.out;
    Tensor y(shape);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xr = x.data().data() + r * l.in;
        double* yr = y.data().data() + r * l.out;
        for (std::size_t o = 0; o < l.out; ++o) {
            const double* w = l.weight.data().data() + o * l.in;
            double acc = l.bias[o];
            for (std::size_t i = 0; i < l.in; ++i) {
                acc += w[i] * xr[i];
            }
            yr[o] = acc;
        }
    }
    return y;
}

Tensor softmaxForward(const Tensor& x) {
    Tensor y = x;
    std::size_t n = x.cols();
    for (std::size_t r = 0; r < x.rows(); ++r) {
        double* v = y.data().data() + r * n;
        double mx = *std::max_element(v, v + n);
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = std::exp(v[i] - mx);
            sum += v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = std::max(v[i] / sum, std::numeric_limits<double>::min());
        }
    }
    return y;
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void putF64(std::vector<std::uint8_t>& out, double d) {
    auto bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
}

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b) : b_(b) {}

    std::uint8_t u8() {
        need(1);
        return b_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(b_[pos_++]) << (8 * i);
        }
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(b_[pos_++]) << (8 * i);
        }
        return std::bit_cast<double>(v);
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s(b_.begin() + static_cast<std::ptrdiff_t>(pos_), b_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
        pos_ += n;
        return s;
    }
    bool done() const {
        return pos_ == b_.size();
    }

private:
    void need(std::size_t n) const {
        if (b_.size() - pos_ < n) {
            throw Error(ErrorCode::BadCheckpoint, "checkpoint truncated at byte " + std::to_string(pos_));
        }
    }

    const std::vector<std::uint8_t>& b_;
    std::size_t pos_ = 0;
};

}  // namespace

Network::Network(std::string headId) : headId_(std::move(headId)) {}

Network Network::mlp(std::string headId, const std::vector<std::size_t>& widths, bool softmax, std::uint64_t seed) {
    if (widths.size() < 2) {
        throw Error(ErrorCode::ConfigError, "an MLP needs at least input and output widths");
    }
    Network net(std::move(headId));
    for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
        if (i > 0) {
            net.relu();
        }
        net.linear(widths[i], widths[i + 1]);
    }
    if (softmax) {
        net.softmax();
    }
    net.initialize(seed);
    return net;
}

void Network::checkAppend(std::size_t in) const {
    if (!layers_.empty() && layers_.back().kind == LayerKind::Softmax) {
        throw Error(ErrorCode::ShapeMismatch, "no layer may follow Softmax", headId_);
    }
    if (!layers_.empty() && outputSize() != in) {
        throw Error(ErrorCode::ShapeMismatch,
                "layer expects " + std::to_string(in) + " inputs, previous emits " + std::to_string(outputSize()),
                headId_);
    }
}

Network& Network::linear(std::size_t in, std::size_t out) {
    if (in == 0 || out == 0) {
        throw Error(ErrorCode::ShapeMismatch, "Linear dimensions must be positive", headId_);
    }
    checkAppend(in);
    Layer l;
    l.kind = LayerKind::Linear;
    l.in = in;
    l.out = out;
    l.weight = Tensor({out, in});
    l.bias = Tensor({out});
    l.weightGrad = Tensor({out, in});
    l.biasGrad = Tensor({out});
    layers_.push_back(std::move(l));
    return *this;
}

Network& Network::relu() {
    if (layers_.empty()) {
        throw Error(ErrorCode::ShapeMismatch, "ReLU needs a preceding Linear layer", headId_);
    }
    std::size_t n = outputSize();
    checkAppend(n);
    layers_.push_back(Layer{LayerKind::ReLU, n, n, {}, {}, {}, {}});
    return *this;
}

Network& Network::softmax() {
    if (layers_.empty()) {
        throw Error(ErrorCode::ShapeMismatch, "Softmax needs a preceding Linear layer", headId_);
    }
    std::size_t n = outputSize();
    checkAppend(n);
    layers_.push_back(Layer{LayerKind::Softmax, n, n, {}, {}, {}, {}});
    return *this;
}

void Network::initialize(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (auto& l : layers_) {
        if (l.kind != LayerKind::Linear) {
            continue;
        }
        double bound = std::sqrt(6.0 / static_cast<double>(l.in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (auto& w : l.weight.data()) {
            w = dist(rng);
        }
        l.bias.fill(0.0);
    }
    zeroGrads();
    cache_.clear();
}

std::size_t Network::inputSize() const {
    return layers_.empty() ? 0 : layers_.front().in;
}

std::size_t Network::outputSize() const {
    return layers_.empty() ? 0 : layers_.back().out;
}

Tensor Network::run(const Tensor& input, std::vector<Tensor>* cache) const {
    if (layers_.empty()) {
        throw Error(ErrorCode::ShapeMismatch, "network has no layers", headId_);
    }
    if (input.rank() < 1 || input.rank() > 2 || input.cols() != inputSize()) {
        throw Error(ErrorCode::ShapeMismatch,
                "input " + input.shapeString() + " does not match " + std::to_string(inputSize()) + " inputs",
                headId_);
    }
    if (!input.allFinite()) {
        throw Error(ErrorCode::DataError, "non-finite network input", headId_);
    }
    Tensor x = input;
    for (const auto& l : layers_) {
        if (cache) {
            cache->push_back(x);
        }
        switch (l.kind) {
        case LayerKind::Linear:
            x = linearForward(l, x);
            break;
        case LayerKind::ReLU:
            for (auto& v : x.data()) {
                v = v > 0.0 ? v : 0.0;
            }
            break;
        case LayerKind::Softmax:
            x = softmaxForward(x);
            break;
        }
    }
    if (!x.allFinite()) {
        throw Error(ErrorCode::DataError, "network produced a non-finite value", headId_);
    }
    return x;
}

Tensor Network::forward(const Tensor& input) {
    std::vector<Tensor> cache;
    Tensor out = run(input, &cache);
    cache_ = std::move(cache);
    output_ = out;
    return out;
}

Tensor Network::predict(const Tensor& input) const {
    return run(input, nullptr);
}

Tensor Network::backward(const Tensor& outputGrad) {
    if (cache_.empty()) {
        throw Error(ErrorCode::NoCachedForward, "backward called before forward", headId_);
    }
    if (outputGrad.shape() != output_.shape()) {
        throw Error(ErrorCode::ShapeMismatch,
                "output gradient " + outputGrad.shapeString() + " vs output " + output_.shapeString(), headId_);
    }
    Tensor g = outputGrad;
    for (std::size_t li = layers_.size(); li-- > 0;) {
        Layer& l = layers_[li];
        const Tensor& x = cache_[li];
        std::size_t rows = x.rows();
        switch (l.kind) {
        case LayerKind::Linear: {
            std::vector<std::size_t> shape = x.shape();
            Tensor gx(shape);
            for (std::size_t r = 0; r < rows; ++r) {
                const double* xr = x.data().data() + r * l.in;
                const double* gr = g.data().data() + r * l.out;
                double* gxr = gx.data().data() + r * l.in;
                for (std::size_t o = 0; o < l.out; ++o) {
                    double go = gr[o];
                    l.biasGrad[o] += go;
                    if (go == 0.0) {
                        continue;
                    }
                    double* wg = l.weightGrad.data().data() + o * l.in;
                    const double* w = l.weight.data().data() + o * l.in;
                    for (std::size_t i = 0; i < l.in; ++i) {
                        wg[i] += go * xr[i];
                        gxr[i] += go * w[i];
                    }
                }
            }
            g = std::move(gx);
            break;
        }
        case LayerKind::ReLU:
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!(x[i] > 0.0)) {
                    g[i] = 0.0;
                }
            }
            break;
        case LayerKind::Softmax: {
            const Tensor& y = li + 1 < layers_.size() ? cache_[li + 1] : output_;
            std::size_t n = l.out;
            for (std::size_t r = 0; r < rows; ++r) {
                double dot = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    dot += g[r * n + i] * y[r * n + i];
                }
                for (std::size_t i = 0; i < n; ++i) {
                    g[r * n + i] = y[r * n + i] * (g[r * n + i] - dot);
                }
            }
            break;
        }
        }
    }
    return g;
}

void Network::zeroGrads() {
    for (auto& l : layers_) {
        l.weightGrad.fill(0.0);
        l.biasGrad.fill(0.0);
    }
}

std::vector<ParamRef> Network::parameters() {
    std::vector<ParamRef> out;
    for (auto& l : layers_) {
        if (l.kind == LayerKind::Linear) {
            out.push_back({&l.weight, &l.weightGrad});
            out.push_back({&l.bias, &l.biasGrad});
        }
    }
    return out;
}

std::size_t Network::parameterCount() const {
    std::size_t n = 0;
    for (const auto& l : layers_) {
        n += l.weight.size() + l.bias.size();
    }
    return n;
}

std::vector<std::uint8_t> Network::serialize() const {
    std::vector<std::uint8_t> out{'N', 'S', 'Y', 'N'};
    put32(out, kCheckpointVersion);
    put32(out, static_cast<std::uint32_t>(headId_.size()));
    out.insert(out.end(), headId_.begin(), headId_.end());
    put32(out, static_cast<std::uint32_t>(layers_.size()));
    for (const auto& l : layers_) {
        out.push_back(static_cast<std::uint8_t>(l.kind));
        put32(out, static_cast<std::uint32_t>(l.in));
        put32(out, static_cast<std::uint32_t>(l.out));
        if (l.kind == LayerKind::Linear) {
            for (double w : l.weight.data()) {
                putF64(out, w);
            }
            for (double b : l.bias.data()) {
                putF64(out, b);
            }
        }
    }
    return out;
}

Network Network::deserialize(const std::vector<std::uint8_t>& bytes) {
    Reader in(bytes);
    if (in.bytes(4) != "NSYN") {
        throw Error(ErrorCode::BadCheckpoint, "missing NSYN magic");
    }
    std::uint32_t version = in.u32();
    if (version != kCheckpointVersion) {
        throw Error(ErrorCode::BadCheckpoint, "unsupported checkpoint version " + std::to_string(version));
    }
    Network net(in.bytes(in.u32()));
    std::uint32_t count = in.u32();
    try {
        for (std::uint32_t i = 0; i < count; ++i) {
            auto kind = static_cast<LayerKind>(in.u8());
            std::uint32_t lin = in.u32();
            std::uint32_t lout = in.u32();
            switch (kind) {
            case LayerKind::Linear: {
                net.linear(lin, lout);
                Layer& l = net.layers_.back();
                for (auto& w : l.weight.data()) {
                    w = in.f64();
                }
                for (auto& b : l.bias.data()) {
                    b = in.f64();
                }
                if (!l.weight.allFinite() || !l.bias.allFinite()) {
                    throw Error(ErrorCode::BadCheckpoint, "non-finite parameter");
                }
                break;
            }
            case LayerKind::ReLU:
            case LayerKind::Softmax:
                kind == LayerKind::ReLU ? net.relu() : net.softmax();
                if (net.layers_.back().in != lin || lin != lout) {
                    throw Error(ErrorCode::BadCheckpoint, "activation dimensions disagree");
                }
                break;
            default:
                throw Error(ErrorCode::BadCheckpoint, "unknown layer tag " + std::to_string(static_cast<int>(kind)));
            }
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ShapeMismatch) {
            throw Error(ErrorCode::BadCheckpoint, e.what());
        }
        throw;
    }
    if (!in.done()) {
        throw Error(ErrorCode::BadCheckpoint, "trailing bytes after checkpoint");
    }
    return net;
}

void Network::save(const std::filesystem::path& path) const {
    auto bytes = serialize();
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write checkpoint", path.string());
    }
}

Network Network::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read checkpoint", path.string());
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return deserialize(bytes);
}

}  // namespace nesy::neural
