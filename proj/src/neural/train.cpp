#include "nesy/neural/train.h"

#include "nesy/error.h"

#include <cmath>
#include <numeric>

namespace nesy::neural {

Optimizer::Optimizer(OptimizerSpec spec) : spec_(spec) {
    if (!(spec_.lr > 0.0) || !std::isfinite(spec_.lr)) {
        throw Error(ErrorCode::ConfigError, "learning rate must be positive");
    }
}

void Optimizer::step(Network& net) {
    auto params = net.parameters();
    if (spec_.kind == OptimizerSpec::Kind::SGD) {
        for (auto& p : params) {
            for (std::size_t i = 0; i < p.value->size(); ++i) {
                (*p.value)[i] -= spec_.lr * (*p.grad)[i];
            }
        }
        return;
    }
    State& s = states_[&net];
    if (s.m.size() != params.size()) {
        s = State{};
        for (auto& p : params) {
            s.m.emplace_back(p.value->shape());
            s.v.emplace_back(p.value->shape());
        }
    }
    ++s.t;
    double c1 = 1.0 - std::pow(spec_.beta1, static_cast<double>(s.t));
    double c2 = 1.0 - std::pow(spec_.beta2, static_cast<double>(s.t));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Tensor& value = *params[k].value;
        const Tensor& grad = *params[k].grad;
        if (s.m[k].shape() != value.shape()) {
            throw Error(ErrorCode::ShapeMismatch, "optimizer state does not match parameters", net.headId());
        }
        for (std::size_t i = 0; i < value.size(); ++i) {
            double g = grad[i];
            double& m = s.m[k][i];
            double& v = s.v[k][i];
            m = spec_.beta1 * m + (1.0 - spec_.beta1) * g;
            v = spec_.beta2 * v + (1.0 - spec_.beta2) * g * g;
            value[i] -= spec_.lr * (m / c1) / (std::sqrt(v / c2) + spec_.eps);
        }
    }
}

Loss nll_loss(const std::vector<double>& predicted, std::size_t target) {
    if (target >= predicted.size()) {
        throw Error(ErrorCode::BadTarget,
                "target " + std::to_string(target) + " outside " + std::to_string(predicted.size()) + " classes");
    }
    double sum = std::accumulate(predicted.begin(), predicted.end(), 0.0);
    if (!(std::abs(sum - 1.0) <= 1e-6)) {
        throw Error(ErrorCode::InvalidProbability, "predicted distribution sums to " + std::to_string(sum));
    }
    double p = std::max(predicted[target], kProbabilityFloor);
    Loss out;
    out.value = -std::log(p);
    out.grad.assign(predicted.size(), 0.0);
    out.grad[target] = -1.0 / p;
    return out;
}

std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) {
            best = i;
        }
    }
    return best;
}

}  // namespace nesy::neural
