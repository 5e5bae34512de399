#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "sinlab/matrix.hpp"
#include "sinlab/rng.hpp"
#include "sinlab/svd.hpp"
#include "test_helpers.hpp"

using namespace sinlab;
using namespace test_support;

TEST_CASE("matrix construction validates its inputs") {
    CHECK_THROWS_AS(Matrix(0, 3), ParameterError);
    CHECK_THROWS_AS(Matrix(3, 0), ParameterError);
    CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), ShapeError);
    CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::nan("")}), NumericError);

    const Matrix zeroed(2, 3);
    for (double v : zeroed.data()) CHECK(v == 0.0);
    CHECK(Matrix::identity(3)(1, 1) == 1.0);
    CHECK(Matrix::identity(3)(1, 2) == 0.0);
}

TEST_CASE("matmul against identity, a hand case, and a naive oracle") {
    Rng rng(11);
    const Matrix a = random_matrix(3, 3, rng);
    CHECK(max_abs_diff(matmul(Matrix::identity(3), a), a) == 0.0);

    const Matrix left(2, 2, {1, 2, 3, 4});
    const Matrix right(2, 1, {0, 1});
    const Matrix prod = matmul(left, right);
    CHECK(prod(0, 0) == 2.0);
    CHECK(prod(1, 0) == 4.0);

    const Matrix big_a = random_matrix(5, 7, rng);
    const Matrix big_b = random_matrix(7, 3, rng);
    CHECK(max_abs_diff(matmul(big_a, big_b), naive_matmul(big_a, big_b)) < 1e-12);
}

TEST_CASE("matmul shape error names both operand shapes") {
    const Matrix a(2, 3);
    const Matrix b(4, 2);
    try {
        matmul(a, b);
        FAIL("expected a shape error");
    } catch (const ShapeError& err) {
        const std::string msg = err.what();
        CHECK(msg.find("2x3") != std::string::npos);
        CHECK(msg.find("4x2") != std::string::npos);
    }
}

TEST_CASE("elementwise helpers behave") {
    const Matrix a(2, 2, {1, 2, 3, 4});
    const Matrix b(2, 2, {5, 6, 7, 8});
    CHECK(add(a, b)(1, 1) == 12.0);
    CHECK(subtract(b, a)(0, 0) == 4.0);
    CHECK(scale(a, 2.0)(1, 0) == 6.0);
    CHECK(hadamard(a, b)(0, 1) == 12.0);
    CHECK(frobenius_norm(Matrix(2, 2, {3, 0, 0, 4})) == doctest::Approx(5.0));
    CHECK(max_abs_diff(transpose(transpose(a)), a) == 0.0);
    CHECK(transpose(a)(0, 1) == 3.0);
}

TEST_CASE("rng streams are deterministic and well scaled") {
    Rng a(42);
    Rng b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.normal() == b.normal());
        CHECK(a.uniform() == b.uniform());
    }

    Rng c(42);
    for (int i = 0; i < 1000; ++i) {
        const double u = c.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const std::uint64_t k = c.uniform_below(7);
        CHECK(k < 7);
    }
    CHECK_THROWS_AS(c.uniform_below(0), ParameterError);
}

TEST_CASE("gaussian_matrix determinism, moments, and scaling") {
    Rng r1(42);
    Rng r2(42);
    CHECK(bitwise_equal(gaussian_matrix(6, 5, 1.0, r1), gaussian_matrix(6, 5, 1.0, r2)));

    Rng r3(7);
    const Matrix big = gaussian_matrix(1000, 1000, 1.0, r3);
    double mean = 0.0;
    for (double v : big.data()) mean += v;
    mean /= static_cast<double>(big.size());
    double var = 0.0;
    for (double v : big.data()) var += (v - mean) * (v - mean);
    var /= static_cast<double>(big.size());
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 0.01);

    Rng r4(9);
    Rng r5(9);
    const Matrix unit = gaussian_matrix(4, 4, 1.0, r4);
    const Matrix half = gaussian_matrix(4, 4, 0.5, r5);
    CHECK(bitwise_equal(half, scale(unit, 0.5)));

    Rng r6(1);
    CHECK_THROWS_AS(gaussian_matrix(2, 2, 0.0, r6), ParameterError);
    CHECK_THROWS_AS(gaussian_matrix(2, 2, -1.0, r6), ParameterError);
}

namespace {

void check_svd_contract(const Matrix& a, double tol = 1e-10) {
    const SvdResult svd = svd_full(a);
    CHECK(svd.u.rows() == a.rows());
    CHECK(svd.u.cols() == a.rows());
    CHECK(svd.v.rows() == a.cols());
    CHECK(svd.v.cols() == a.cols());
    CHECK(svd.s.size() == std::min(a.rows(), a.cols()));
    CHECK(orthogonality_defect(svd.u) < tol);
    CHECK(orthogonality_defect(svd.v) < tol);
    for (std::size_t i = 0; i + 1 < svd.s.size(); ++i) CHECK(svd.s[i] >= svd.s[i + 1]);
    for (double sv : svd.s) CHECK(sv >= 0.0);
    CHECK(relative_frobenius_error(a, reconstruct(svd)) < tol);
    for (std::size_t j = 0; j < svd.u.cols(); ++j) {
        double largest = 0.0;
        for (std::size_t i = 0; i < svd.u.rows(); ++i) {
            if (std::abs(svd.u(i, j)) > std::abs(largest)) largest = svd.u(i, j);
        }
        CHECK(largest >= 0.0);  // sign convention
    }
}

}  // namespace

TEST_CASE("svd of a diagonal matrix is the diagonal") {
    const SvdResult svd = svd_full(Matrix(2, 2, {3, 0, 0, 1}));
    CHECK(svd.s[0] == doctest::Approx(3.0));
    CHECK(svd.s[1] == doctest::Approx(1.0));
    CHECK(max_abs_diff(svd.u, Matrix::identity(2)) < 1e-12);
    CHECK(max_abs_diff(svd.v, Matrix::identity(2)) < 1e-12);
}

TEST_CASE("svd of the zero matrix") {
    const Matrix zero(4, 2);
    const SvdResult svd = svd_full(zero);
    CHECK(svd.s[0] == 0.0);
    CHECK(svd.s[1] == 0.0);
    check_svd_contract(zero);
}

TEST_CASE("svd reconstruction of a random 30x20 matrix") {
    Rng rng(5);
    check_svd_contract(random_matrix(30, 20, rng, 2.0));
}

TEST_CASE("svd contract over random shapes including rank-deficient") {
    Rng rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t rows = 1 + rng.uniform_below(32);
        const std::size_t cols = 1 + rng.uniform_below(32);
        Matrix a;
        if (trial % 3 == 0) {
            const std::size_t full = std::min(rows, cols);
            const std::size_t rank = 1 + rng.uniform_below(full);
            a = random_low_rank(rows, cols, rank, rng);
        } else {
            a = random_matrix(rows, cols, rng);
        }
        CAPTURE(trial);
        check_svd_contract(a);
    }
}

TEST_CASE("svd is deterministic") {
    Rng rng(17);
    const Matrix a = random_matrix(12, 9, rng);
    const SvdResult first = svd_full(a);
    const SvdResult second = svd_full(a);
    CHECK(bitwise_equal(first.u, second.u));
    CHECK(bitwise_equal(first.v, second.v));
    CHECK(first.s == second.s);
    CHECK_THROWS_AS(svd_full(Matrix()), ShapeError);
}

TEST_CASE("pinv of an invertible diagonal matrix") {
    const Matrix inv = pinv(Matrix(2, 2, {2, 0, 0, 4}));
    CHECK(inv(0, 0) == doctest::Approx(0.5));
    CHECK(inv(1, 1) == doctest::Approx(0.25));
    CHECK(std::abs(inv(0, 1)) < 1e-14);
    CHECK(std::abs(inv(1, 0)) < 1e-14);
}

TEST_CASE("pinv of a rank-1 matrix satisfies the Penrose conditions") {
    const Matrix a(2, 2, {1, 1, 1, 1});
    const Matrix ap = pinv(a);
    CHECK(max_abs_diff(ap, Matrix(2, 2, {0.25, 0.25, 0.25, 0.25})) < 1e-12);
    CHECK(penrose_defect(a, ap) < 1e-8);
}

TEST_CASE("pinv is an involution on full-rank input") {
    Rng rng(3);
    const Matrix a = random_matrix(6, 4, rng);
    CHECK(max_abs_diff(pinv(pinv(a)), a) < 1e-8);
}

TEST_CASE("Penrose conditions hold across random shapes") {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t rows = 1 + rng.uniform_below(20);
        const std::size_t cols = 1 + rng.uniform_below(20);
        const Matrix a =
            trial % 4 == 0
                ? random_low_rank(rows, cols,
                                  1 + rng.uniform_below(std::min(rows, cols)), rng)
                : random_matrix(rows, cols, rng);
        CAPTURE(trial);
        CHECK(penrose_defect(a, pinv(a)) < 1e-8);
    }
}

TEST_CASE("orthogonal_factor leaves orthogonal input unchanged") {
    Rng rng(13);
    const Matrix q = orthogonal_factor(random_matrix(5, 5, rng));
    CHECK(orthogonality_defect(q) < 1e-10);  // q really is orthogonal
    CHECK(max_abs_diff(orthogonal_factor(q), q) < 1e-10);
}

TEST_CASE("orthogonal_factor of a positive diagonal is the identity") {
    CHECK(max_abs_diff(orthogonal_factor(Matrix(2, 2, {5, 0, 0, 0.2})),
                       Matrix::identity(2)) < 1e-12);
}

TEST_CASE("orthogonal_factor output has unit singular values") {
    Rng rng(23);
    const Matrix w = orthogonal_factor(random_matrix(8, 5, rng));
    CHECK(w.rows() == 8);
    CHECK(w.cols() == 5);
    CHECK(orthogonality_defect(w) < 1e-10);  // w^T w = I_5 directly
    for (double sv : singular_values(w)) CHECK(std::abs(sv - 1.0) < 1e-10);
}

TEST_CASE("multiplication by orthogonal matrices preserves singular values") {
    Rng rng(37);
    const Matrix a = random_matrix(6, 4, rng);
    const Matrix q = orthogonal_factor(random_matrix(6, 6, rng));
    const Matrix p = orthogonal_factor(random_matrix(4, 4, rng));
    const std::vector<double> base = singular_values(a);
    CHECK(spectrum_distance(base, singular_values(matmul(q, a))) < 1e-10);
    CHECK(spectrum_distance(base, singular_values(matmul(a, p))) < 1e-10);
}
