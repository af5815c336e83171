#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nesy::neural {

/** Dense row-major tensor of doubles. */
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);

    /** Throws ShapeMismatch unless data.size() is the product of shape. */
    static Tensor from(std::vector<std::size_t> shape, std::vector<double> data);
    static Tensor vector(std::vector<double> data);

    const std::vector<std::size_t>& shape() const {
        return shape_;
    }
    std::size_t rank() const {
        return shape_.size();
    }
    std::size_t dim(std::size_t i) const {
        return shape_.at(i);
    }
    std::size_t size() const {
        return data_.size();
    }
    /** Leading dimension for a batch ([B, n] -> B), 1 for a vector. */
    std::size_t rows() const;
    /** Trailing dimension. */
    std::size_t cols() const;

    double& operator[](std::size_t i) {
        return data_[i];
    }
    double operator[](std::size_t i) const {
        return data_[i];
    }
    double& at(std::size_t r, std::size_t c) {
        return data_[r * cols() + c];
    }
    double at(std::size_t r, std::size_t c) const {
        return data_[r * cols() + c];
    }
    std::vector<double>& data() {
        return data_;
    }
    const std::vector<double>& data() const {
        return data_;
    }
    /** Copy of row r of a batch. */
    std::vector<double> row(std::size_t r) const;

    void fill(double v);
    bool allFinite() const;
    std::string shapeString() const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

}  // namespace nesy::neural
