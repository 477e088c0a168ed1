#include "pathgrad/matrix.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>

#include "pathgrad/errors.hpp"

namespace pathgrad {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (!a.same_shape(b)) {
        throw input_error(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) +
                          "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                          "x" + std::to_string(b.cols()) + ")");
    }
}

void require_finite(const Matrix& m, const char* op) {
    if (!m.all_finite()) {
        throw numeric_error(std::string(op) + ": result contains non-finite entries");
    }
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix Matrix::from_data(std::size_t rows, std::size_t cols, std::vector<double> data) {
    if (data.size() != rows * cols) {
        throw input_error("Matrix::from_data: data length " + std::to_string(data.size()) +
                          " does not match " + std::to_string(rows) + "x" + std::to_string(cols));
    }
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    require_finite(m, "Matrix::from_data");
    return m;
}

std::span<const double> Matrix::row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
}

std::span<double> Matrix::row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
}

void Matrix::set_row(std::size_t i, std::span<const double> values) {
    if (values.size() != cols_) {
        throw input_error("Matrix::set_row: row length mismatch");
    }
    auto dst = row(i);
    for (std::size_t j = 0; j < cols_; ++j) dst[j] = values[j];
}

bool Matrix::all_finite() const noexcept {
    for (double v : data_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double Matrix::sum() const noexcept {
    double acc = 0.0;
    for (double v : data_) acc += v;
    return acc;
}

double Matrix::max_abs() const noexcept {
    double best = 0.0;
    for (double v : data_) best = std::max(best, std::abs(v));
    return best;
}

Matrix add(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "add");
    Matrix out(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) out.data()[k] = a.data()[k] + b.data()[k];
    require_finite(out, "add");
    return out;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "subtract");
    Matrix out(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) out.data()[k] = a.data()[k] - b.data()[k];
    require_finite(out, "subtract");
    return out;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "hadamard");
    Matrix out(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) out.data()[k] = a.data()[k] * b.data()[k];
    require_finite(out, "hadamard");
    return out;
}

Matrix scale(const Matrix& a, double factor) {
    Matrix out(a.rows(), a.cols());
    for (std::size_t k = 0; k < a.size(); ++k) out.data()[k] = a.data()[k] * factor;
    require_finite(out, "scale");
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw input_error("matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                          " vs " + std::to_string(b.rows()) + ")");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                out(i, j) += aik * b(k, j);
            }
        }
    }
    require_finite(out, "matmul");
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double best = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        best = std::max(best, std::abs(a.data()[k] - b.data()[k]));
    }
    return best;
}

} // namespace pathgrad
