#include "nesy/neural/network.h"
#include "nesy/verify/suites.h"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace nesy::verify {

using neural::LayerKind;
using neural::Network;
using neural::Tensor;

namespace {

double weightedOutput(const Network& net, const Tensor& x, const Tensor& g) {
    Tensor y = net.predict(x);
    double s = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        s += y[i] * g[i];
    }
    return s;
}

bool nearKink(const Network& net) {
    const auto& acts = net.activations();
    for (std::size_t li = 0; li < net.layers().size(); ++li) {
        if (net.layers()[li].kind != LayerKind::ReLU) {
            continue;
        }
        for (double v : acts[li].data()) {
            if (std::abs(v) < 1e-3) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace

SuiteResult networkGradients(std::size_t instances, std::uint64_t seed) {
    SuiteResult r("network-gradient");
    auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    auto between = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    const double eps = kFiniteDifferenceStep;
    while (r.instances < instances) {
        std::vector<std::size_t> widths;
        for (std::size_t n = between(2, 4); n > 0; --n) {
            widths.push_back(between(1, 5));
        }
        bool softmax = between(0, 1) == 1;
        if (softmax) {
            widths.back() = std::max<std::size_t>(widths.back(), 2);
        }
        Network net = Network::mlp("check", widths, softmax, rng());
        for (auto& p : net.parameters()) {
            if (p.value->rank() == 1) {
                for (auto& b : p.value->data()) {
                    b = 0.5 * sym(rng);
                }
            }
        }
        std::size_t batch = between(1, 3);
        Tensor x = batch == 1 ? Tensor({widths.front()}) : Tensor({batch, widths.front()});
        for (auto& v : x.data()) {
            v = sym(rng);
        }
        Tensor y = net.forward(x);
        if (nearKink(net)) {
            continue;
        }
        Tensor g(y.shape());
        for (auto& v : g.data()) {
            v = sym(rng);
        }
        Tensor gx = net.backward(g);
        ++r.instances;

        auto check = [&](double& slot, double analytic, const char* what, std::size_t index) {
            double saved = slot;
            slot = saved + eps;
            double hi = weightedOutput(net, x, g);
            slot = saved - eps;
            double lo = weightedOutput(net, x, g);
            slot = saved;
            double numeric = (hi - lo) / (2 * eps);
            double err = relativeError(analytic, numeric);
            r.maxError = std::max(r.maxError, err);
            if (!(err < kGradientTolerance)) {
                std::ostringstream os;
                os << "instance " << r.instances << " " << what << "[" << index << "]: analytic " << analytic
                   << " numeric " << numeric;
                r.fail(os.str());
                return false;
            }
            return true;
        };
        bool ok = true;
        for (auto& p : net.parameters()) {
            for (std::size_t i = 0; ok && i < p.value->size(); ++i) {
                ok = check((*p.value)[i], (*p.grad)[i], p.value->rank() == 2 ? "weight" : "bias", i);
            }
        }
        for (std::size_t i = 0; ok && i < x.size(); ++i) {
            ok = check(x[i], gx[i], "input", i);
        }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace nesy::verify
