#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace vspk {

/// Dense row-major matrix of kernel values. Square Gram matrices are symmetric;
/// rectangular blocks hold test-versus-train rows.
class GramMatrix {
public:
    GramMatrix() = default;
    GramMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), v_(rows * cols, 0.0) {}
    GramMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return rows_; }

    double& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }
    std::span<const double> row(std::size_t i) const { return {v_.data() + i * cols_, cols_}; }
    std::span<const double> values() const { return v_; }

    /// Block K[rows x cols].
    GramMatrix submatrix(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const;

    friend bool operator==(const GramMatrix&, const GramMatrix&) = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> v_;
};

}  // namespace vspk
