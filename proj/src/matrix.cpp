#include "sinlab/matrix.hpp"

#include <cmath>
#include <utility>

namespace sinlab {

namespace {

void check_positive_dims(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw ParameterError("matrix dimensions must be positive, got " +
                             std::to_string(rows) + "x" + std::to_string(cols));
    }
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a) +
                         " vs " + shape_string(b));
    }
}

void check_non_empty(const Matrix& m, const char* op) {
    if (m.empty()) {
        throw ShapeError(std::string(op) + ": empty matrix operand");
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
    check_positive_dims(rows, cols);
    data_.assign(rows * cols, 0.0);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
    check_positive_dims(rows, cols);
    if (data_.size() != rows * cols) {
        throw ShapeError("matrix data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
    ensure_finite(*this, "matrix construction");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::string shape_string(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void ensure_finite(const Matrix& m, const char* context) {
    for (double v : m.data()) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string(context) + ": non-finite entry");
        }
    }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_non_empty(a, "matmul");
    check_non_empty(b, "matmul");
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions disagree, " + shape_string(a) +
                         " * " + shape_string(b));
    }
    Matrix c(a.rows(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            const double av = a(i, l);
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                c(i, j) += av * b(l, j);
            }
        }
    }
    ensure_finite(c, "matmul result");
    return c;
}

Matrix transpose(const Matrix& a) {
    check_non_empty(a, "transpose");
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

Matrix add(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "add");
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] += b.data()[i];
    ensure_finite(c, "add result");
    return c;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "subtract");
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] -= b.data()[i];
    ensure_finite(c, "subtract result");
    return c;
}

Matrix scale(const Matrix& a, double factor) {
    check_non_empty(a, "scale");
    Matrix c = a;
    for (double& v : c.data()) v *= factor;
    ensure_finite(c, "scale result");
    return c;
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
    check_same_shape(a, b, "hadamard");
    Matrix c = a;
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] *= b.data()[i];
    ensure_finite(c, "hadamard result");
    return c;
}

double frobenius_norm(const Matrix& a) {
    double sum = 0.0;
    for (double v : a.data()) sum += v * v;
    return std::sqrt(sum);
}

}  // namespace sinlab
