#pragma once

#include "nesy/neural/network.h"

#include <map>
#include <vector>

namespace nesy::neural {

struct OptimizerSpec {
    enum class Kind { SGD, Adam };
    Kind kind = Kind::Adam;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static OptimizerSpec sgd(double lr) {
        return {Kind::SGD, lr};
    }
    static OptimizerSpec adam(double lr) {
        return {Kind::Adam, lr};
    }
};

/** SGD or bias-corrected Adam; moment buffers are created on the first step of each network. */
class Optimizer {
public:
    /** Throws ConfigError unless lr > 0. */
    explicit Optimizer(OptimizerSpec spec);

    void step(Network& net);
    const OptimizerSpec& spec() const {
        return spec_;
    }

private:
    struct State {
        std::vector<Tensor> m;
        std::vector<Tensor> v;
        std::size_t t = 0;
    };

    OptimizerSpec spec_;
    std::map<const Network*, State> states_;
};

inline void zero_grads(Network& net) {
    net.zeroGrads();
}
inline void step(Optimizer& opt, Network& net) {
    opt.step(net);
}

inline constexpr double kProbabilityFloor = 1e-12;

struct Loss {
    double value = 0.0;
    std::vector<double> grad;
};

/**
 * -ln(max(p[target], 1e-12)); gradient -1/max(p[target], 1e-12) at the
 * target, 0 elsewhere. Throws BadTarget for an out-of-range target and
 * InvalidProbability unless p sums to 1 within 1e-6.
 */
Loss nll_loss(const std::vector<double>& predicted, std::size_t target);

/** Index of the largest entry; ties go to the lowest index. */
std::size_t argmax(const std::vector<double>& v);

}  // namespace nesy::neural
