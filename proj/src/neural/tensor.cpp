#include "nesy/neural/tensor.h"

#include "nesy/error.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace nesy::neural {

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill) : shape_(std::move(shape)), data_(product(shape_), fill) {}

Tensor Tensor::from(std::vector<std::size_t> shape, std::vector<double> data) {
    if (product(shape) != data.size()) {
        Tensor probe;
        probe.shape_ = shape;
        throw Error(ErrorCode::ShapeMismatch,
                "shape " + probe.shapeString() + " needs " + std::to_string(product(shape)) + " values, got " +
                        std::to_string(data.size()));
    }
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = std::move(data);
    return t;
}

Tensor Tensor::vector(std::vector<double> data) {
    std::size_t n = data.size();
    return from({n}, std::move(data));
}

std::size_t Tensor::rows() const {
    return shape_.size() <= 1 ? 1 : product(std::vector<std::size_t>(shape_.begin(), shape_.end() - 1));
}

std::size_t Tensor::cols() const {
    return shape_.empty() ? 1 : shape_.back();
}

std::vector<double> Tensor::row(std::size_t r) const {
    std::size_t n = cols();
    return std::vector<double>(data_.begin() + static_cast<std::ptrdiff_t>(r * n),
            data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * n));
}

void Tensor::fill(double v) {
    std::fill(data_.begin(), data_.end(), v);
}

bool Tensor::allFinite() const {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

std::string Tensor::shapeString() const {
    std::string s = "[";
    for (std::size_t i = 0; i < shape_.size(); ++i) {
        s += (i ? ", " : "") + std::to_string(shape_[i]);
    }
    return s + "]";
}

}  // namespace nesy::neural
