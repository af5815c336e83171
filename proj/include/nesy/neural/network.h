#pragma once

#include "nesy/neural/tensor.h"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nesy::neural {

enum class LayerKind : std::uint8_t { Linear = 0, ReLU = 1, Softmax = 2 };

struct Layer {
    LayerKind kind = LayerKind::Linear;
    std::size_t in = 0;
    std::size_t out = 0;
    Tensor weight;  // [out, in]
    Tensor bias;    // [out]
    Tensor weightGrad;
    Tensor biasGrad;
};

/** A parameter tensor with its gradient buffer. */
struct ParamRef {
    Tensor* value;
    Tensor* grad;
};

/**
 * Feedforward network of Linear, ReLU and Softmax layers, mapping a vector
 * [in] or a batch [B, in] to [out] or [B, out]. forward caches the
 * activations that backward consumes; backward adds into the gradient
 * buffers until zeroGrads.
 */
class Network {
public:
    explicit Network(std::string headId = {});

    /** Linear layers of the given widths with ReLU between them, optionally a final Softmax. */
    static Network mlp(std::string headId, const std::vector<std::size_t>& widths, bool softmax, std::uint64_t seed);

    Network& linear(std::size_t in, std::size_t out);
    Network& relu();
    Network& softmax();

    /** Kaiming-uniform weights (bound sqrt(6 / fan_in)), zero biases. */
    void initialize(std::uint64_t seed);

    Tensor forward(const Tensor& input);
    /** Gradient with respect to the last forward input. Throws NoCachedForward. */
    Tensor backward(const Tensor& outputGrad);
    /** forward without touching the cache. */
    Tensor predict(const Tensor& input) const;

    void zeroGrads();
    std::vector<ParamRef> parameters();
    std::size_t parameterCount() const;

    const std::string& headId() const {
        return headId_;
    }
    const std::vector<Layer>& layers() const {
        return layers_;
    }
    std::vector<Layer>& layers() {
        return layers_;
    }
    std::size_t inputSize() const;
    std::size_t outputSize() const;
    /** Input of every layer from the last forward (empty when none). */
    const std::vector<Tensor>& activations() const {
        return cache_;
    }

    /** Checkpoint: "NSYN", version, head id, layers with little-endian f64 payloads. */
    void save(const std::filesystem::path& path) const;
    static Network load(const std::filesystem::path& path);
    std::vector<std::uint8_t> serialize() const;
    static Network deserialize(const std::vector<std::uint8_t>& bytes);

private:
    void checkAppend(std::size_t in) const;
    Tensor run(const Tensor& input, std::vector<Tensor>* cache) const;

    std::string headId_;
    std::vector<Layer> layers_;
    std::vector<Tensor> cache_;
    Tensor output_;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace nesy::neural
