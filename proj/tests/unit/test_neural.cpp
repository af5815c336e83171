#include "doctest.h"

#include "nesy/error.h"
#include "nesy/neural/network.h"
#include "nesy/neural/train.h"
#include "nesy/verify/suites.h"

#include <cmath>
#include <filesystem>

using namespace nesy;
using namespace nesy::neural;

namespace {

Network identity3() {
    Network net("id");
    net.linear(3, 3);
    auto& w = net.layers()[0].weight;
    for (std::size_t i = 0; i < 3; ++i) {
        w.at(i, i) = 1.0;
    }
    return net;
}

Network softmaxOnly(std::size_t n) {
    Network net("sm");
    net.linear(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        net.layers()[0].weight.at(i, i) = 1.0;
    }
    net.softmax();
    return net;
}

ErrorCode codeOf(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::DataError;
}

}  // namespace

TEST_CASE("identity linear layer") {
    auto net = identity3();
    auto y = net.forward(Tensor::vector({1, 2, 3}));
    CHECK(y.data() == std::vector<double>{1, 2, 3});
}

TEST_CASE("softmax closed forms") {
    auto net = softmaxOnly(2);
    auto y = net.forward(Tensor::vector({0, 0}));
    CHECK(y[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(y[1] == doctest::Approx(0.5).epsilon(1e-15));
    y = net.forward(Tensor::vector({std::log(1.0), std::log(3.0)}));
    CHECK(std::abs(y[0] - 0.25) < 1e-12);
    CHECK(std::abs(y[1] - 0.75) < 1e-12);
    y = net.forward(Tensor::vector({-2000, 2000}));
    CHECK(y[0] > 0.0);
    CHECK(std::abs(y[0] + y[1] - 1.0) < 1e-9);
}

TEST_CASE("batched softmax rows are normalized") {
    auto net = Network::mlp("h", {4, 8, 5}, true, 3);
    Tensor x({6, 4});
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::sin(static_cast<double>(i));
    }
    auto y = net.forward(x);
    REQUIRE(y.shape() == std::vector<std::size_t>{6, 5});
    for (std::size_t r = 0; r < 6; ++r) {
        double s = 0;
        for (double v : y.row(r)) {
            CHECK(v > 0.0);
            s += v;
        }
        CHECK(std::abs(s - 1.0) < 1e-9);
    }
}

TEST_CASE("shape errors") {
    auto net = identity3();
    CHECK(codeOf([&] { net.forward(Tensor::vector({1, 2})); }) == ErrorCode::ShapeMismatch);
    CHECK(codeOf([&] { net.linear(4, 2); }) == ErrorCode::ShapeMismatch);
    net.softmax();
    CHECK(codeOf([&] { net.relu(); }) == ErrorCode::ShapeMismatch);
    CHECK(codeOf([&] { Tensor::from({2, 2}, {1, 2, 3}); }) == ErrorCode::ShapeMismatch);
    Network fresh = Network::mlp("h", {2, 2}, false, 1);
    CHECK(codeOf([&] { fresh.backward(Tensor::vector({1, 1})); }) == ErrorCode::NoCachedForward);
}

TEST_CASE("backward accumulates linearly") {
    auto net = Network::mlp("h", {3, 4, 2}, true, 11);
    Tensor x = Tensor::vector({0.3, -0.2, 0.9});
    net.forward(x);
    net.backward(Tensor::vector({0.0, 0.0}));
    for (auto& p : net.parameters()) {
        for (double g : p.grad->data()) {
            CHECK(g == 0.0);
        }
    }
    net.backward(Tensor::vector({1.0, -0.5}));
    std::vector<Tensor> once;
    for (auto& p : net.parameters()) {
        once.push_back(*p.grad);
    }
    net.backward(Tensor::vector({1.0, -0.5}));
    auto params = net.parameters();
    for (std::size_t k = 0; k < params.size(); ++k) {
        for (std::size_t i = 0; i < once[k].size(); ++i) {
            CHECK((*params[k].grad)[i] == doctest::Approx(2 * once[k][i]).epsilon(1e-15));
        }
    }
    net.zeroGrads();
    CHECK(net.parameters()[0].grad->data() == std::vector<double>(12, 0.0));
}

TEST_CASE("finite-difference gradient check") {
    auto r = verify::networkGradients(1000, 5);
    INFO(r.firstFailure);
    CHECK(r.passed());
    CHECK(r.maxError < 1e-4);
}

TEST_CASE("optimizers") {
    Network net("p");
    net.linear(1, 1);
    auto& w = net.layers()[0].weight;
    auto& g = net.layers()[0].weightGrad;

    w[0] = 1.0;
    g[0] = 1.0;
    Optimizer sgd(OptimizerSpec::sgd(0.1));
    sgd.step(net);
    CHECK(w[0] == doctest::Approx(0.9).epsilon(1e-15));

    w[0] = 1.0;
    Optimizer adam(OptimizerSpec::adam(0.001));
    adam.step(net);
    CHECK(std::abs((w[0] - 1.0) + 0.001) < 1e-9);

    w[0] = 1.0;
    g[0] = 0.0;
    Optimizer adam2(OptimizerSpec::adam(0.001));
    adam2.step(net);
    sgd.step(net);
    CHECK(w[0] == 1.0);

    CHECK(codeOf([] { Optimizer(OptimizerSpec::sgd(0.0)); }) == ErrorCode::ConfigError);
}

TEST_CASE("nll loss") {
    auto l = nll_loss({0, 1, 0}, 1);
    CHECK(l.value == 0.0);
    CHECK(l.grad == std::vector<double>{0, -1, 0});
    l = nll_loss(std::vector<double>(10, 0.1), 4);
    CHECK(l.value == doctest::Approx(std::log(10.0)));
    l = nll_loss({1, 0}, 1);
    CHECK(l.value == doctest::Approx(std::log(1e12)));
    CHECK(std::isfinite(l.grad[1]));
    CHECK(codeOf([] { nll_loss({0.5, 0.5}, 2); }) == ErrorCode::BadTarget);
    CHECK(codeOf([] { nll_loss({0.5, 0.4}, 0); }) == ErrorCode::InvalidProbability);
}

TEST_CASE("training is deterministic and reduces loss") {
    auto train = [] {
        auto net = Network::mlp("xor", {2, 8, 2}, true, 42);
        Optimizer opt(OptimizerSpec::adam(0.05));
        const double xs[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
        const std::size_t ys[4] = {0, 1, 1, 0};
        double first = 0;
        double last = 0;
        for (int epoch = 0; epoch < 300; ++epoch) {
            double total = 0;
            net.zeroGrads();
            for (int i = 0; i < 4; ++i) {
                auto y = net.forward(Tensor::vector({xs[i][0], xs[i][1]}));
                auto l = nll_loss(y.data(), ys[i]);
                total += l.value;
                net.backward(Tensor::vector(l.grad));
            }
            opt.step(net);
            (epoch == 0 ? first : last) = total;
        }
        return std::make_pair(net.serialize(), std::make_pair(first, last));
    };
    auto a = train();
    auto b = train();
    CHECK(a.first == b.first);
    CHECK(a.second.second < 0.1 * a.second.first);
}

TEST_CASE("checkpoint round trip") {
    auto net = Network::mlp("digit", {4, 3, 2}, true, 9);
    auto path = std::filesystem::temp_directory_path() / "nesy_test_checkpoint.nsyn";
    net.save(path);
    auto back = Network::load(path);
    std::filesystem::remove(path);
    CHECK(back.headId() == "digit");
    CHECK(back.serialize() == net.serialize());
    Tensor x = Tensor::vector({0.1, 0.2, 0.3, 0.4});
    CHECK(back.predict(x) == net.predict(x));

    auto bytes = net.serialize();
    CHECK(bytes[0] == 'N');
    auto bad = bytes;
    bad[0] = 'X';
    CHECK(codeOf([&] { Network::deserialize(bad); }) == ErrorCode::BadCheckpoint);
    bad = bytes;
    bad.pop_back();
    CHECK(codeOf([&] { Network::deserialize(bad); }) == ErrorCode::BadCheckpoint);
    bad = bytes;
    bad[4] = 9;
    CHECK(codeOf([&] { Network::deserialize(bad); }) == ErrorCode::BadCheckpoint);
    CHECK(codeOf([] { Network::load("/nonexistent/dir/x.nsyn"); }) == ErrorCode::IoError);
}
