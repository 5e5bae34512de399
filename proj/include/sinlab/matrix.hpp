#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "sinlab/errors.hpp"

namespace sinlab {

/// Dense row-major matrix of 64-bit floats. Entries are finite on
/// construction; operations that can overflow re-check their results.
class Matrix {
public:
    Matrix() = default;  // empty placeholder, unusable until assigned
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }
    double operator()(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return data_[r * cols_ + c];
    }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// "RxC" shape tag for error messages.
std::string shape_string(const Matrix& m);

/// Throws NumericError if any entry of m is NaN or infinite.
void ensure_finite(const Matrix& m, const char* context);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, double factor);
Matrix hadamard(const Matrix& a, const Matrix& b);
double frobenius_norm(const Matrix& a);

}  // namespace sinlab
