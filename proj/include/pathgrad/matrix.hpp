#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pathgrad {

/// Dense row-major matrix of 64-bit reals. Results of the arithmetic helpers
/// are freshly allocated; treat returned matrices as immutable values.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    // Takes ownership of `data`; throws input_error on length mismatch and
    // numeric_error if any entry is non-finite.
    static Matrix from_data(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const;
    std::span<double> row(std::size_t i);
    void set_row(std::size_t i, std::span<const double> values);

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const noexcept;
    double sum() const noexcept;
    double max_abs() const noexcept;

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);
Matrix matmul(const Matrix& a, const Matrix& b);

double dot(std::span<const double> a, std::span<const double> b);

/// Largest absolute entry-wise difference; both shapes must agree.
double max_abs_diff(const Matrix& a, const Matrix& b);

} // namespace pathgrad
