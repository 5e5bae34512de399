#include "sinlab/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sinlab {

namespace {

constexpr int kMaxSweeps = 60;
constexpr double kOffDiagTol = 1e-12;

double row_dot(const Matrix& m, std::size_t p, std::size_t q) {
    const std::size_t len = m.cols();
    const double* a = m.data().data() + p * len;
    const double* b = m.data().data() + q * len;
    double sum = 0.0;
    for (std::size_t k = 0; k < len; ++k) sum += a[k] * b[k];
    return sum;
}

void rotate_rows(Matrix& m, std::size_t p, std::size_t q, double c, double s) {
    const std::size_t len = m.cols();
    double* a = m.data().data() + p * len;
    double* b = m.data().data() + q * len;
    for (std::size_t k = 0; k < len; ++k) {
        const double ap = a[k];
        const double bq = b[k];
        a[k] = c * ap - s * bq;
        b[k] = s * ap + c * bq;
    }
}

// Orthogonalizes the rows of bt by plane rotations (Hestenes sweeps),
// accumulating the rotations into the rows of vt. Rows rather than columns
// so every inner loop walks contiguous memory. Converged when every row
// pair is orthogonal to relative precision kOffDiagTol.
void jacobi_orthogonalize(Matrix& bt, Matrix& vt) {
    const std::size_t n = bt.rows();
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool converged = true;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double alpha = row_dot(bt, p, p);
                const double beta = row_dot(bt, q, q);
                if (alpha == 0.0 || beta == 0.0) continue;
                const double gamma = row_dot(bt, p, q);
                if (std::abs(gamma) <= kOffDiagTol * std::sqrt(alpha) * std::sqrt(beta)) {
                    continue;
                }
                converged = false;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                double t;
                if (std::abs(zeta) > 1e140) {
                    t = 1.0 / (2.0 * zeta);  // asymptotic form, avoids zeta^2 overflow
                } else {
                    t = std::copysign(1.0, zeta) /
                        (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                }
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                rotate_rows(bt, p, q, c, s);
                rotate_rows(vt, p, q, c, s);
            }
        }
        if (converged) return;
    }
    throw NumericError("svd_full: no convergence after " +
                       std::to_string(kMaxSweeps) + " sweeps");
}

// Fills u columns [filled, m) with an orthonormal completion. Each slot
// takes the standard basis vector least explained by the span so far (its
// residual norm^2 is at least (m - slot) / m, so it is never degenerate),
// re-orthogonalized twice against everything already placed.
void complete_basis(Matrix& u, std::size_t filled) {
    const std::size_t m = u.rows();
    for (std::size_t slot = filled; slot < m; ++slot) {
        std::size_t best = 0;
        double best_residual = -1.0;
        for (std::size_t i = 0; i < m; ++i) {
            double absorbed = 0.0;
            for (std::size_t j = 0; j < slot; ++j) absorbed += u(i, j) * u(i, j);
            const double residual = 1.0 - absorbed;
            if (residual > best_residual) {
                best_residual = residual;
                best = i;
            }
        }
        std::vector<double> col(m, 0.0);
        col[best] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t j = 0; j < slot; ++j) {
                double proj = 0.0;
                for (std::size_t k = 0; k < m; ++k) proj += col[k] * u(k, j);
                for (std::size_t k = 0; k < m; ++k) col[k] -= proj * u(k, j);
            }
        }
        double norm_sq = 0.0;
        for (double x : col) norm_sq += x * x;
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (std::size_t k = 0; k < m; ++k) u(k, slot) = col[k] * inv;
    }
}

// SVD of a tall-or-square matrix (rows >= cols). Works on the transpose so
// the sweeps touch contiguous rows; transposes back on the way out.
SvdResult svd_tall(const Matrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    Matrix bt = transpose(a);              // row j is working column j
    Matrix vt = Matrix::identity(n);       // row j is v's column j
    jacobi_orthogonalize(bt, vt);

    std::vector<double> norms(n);
    for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(row_dot(bt, j, j));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

    SvdResult out;
    out.s.resize(n);
    out.v = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.s[j] = norms[src];
        for (std::size_t k = 0; k < n; ++k) out.v(k, j) = vt(src, k);
    }

    // Columns whose norm sits at the rounding floor are numerically rank
    // deficient; their directions are noise and get replaced by a clean
    // orthonormal completion (their tiny s is kept as computed).
    const double cutoff = out.s[0] * static_cast<double>(std::max(m, n)) *
                          std::numeric_limits<double>::epsilon();
    out.u = Matrix(m, m);
    std::size_t filled = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (out.s[j] > cutoff) {
            const std::size_t src = order[j];
            const double inv = 1.0 / out.s[j];
            for (std::size_t k = 0; k < m; ++k) out.u(k, j) = bt(src, k) * inv;
            filled = j + 1;
        } else {
            break;  // sorted, all later columns are at the floor too
        }
    }
    complete_basis(out.u, filled);
    return out;
}

// Largest-magnitude entry of each u column made non-negative; paired v
// columns flip along so the product is unchanged.
void enforce_sign_convention(SvdResult& r) {
    const std::size_t k = r.s.size();
    for (std::size_t j = 0; j < r.u.cols(); ++j) {
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t i = 0; i < r.u.rows(); ++i) {
            const double mag = std::abs(r.u(i, j));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (r.u(arg, j) < 0.0) {
            for (std::size_t i = 0; i < r.u.rows(); ++i) r.u(i, j) = -r.u(i, j);
            if (j < k) {
                for (std::size_t i = 0; i < r.v.rows(); ++i) r.v(i, j) = -r.v(i, j);
            }
        }
    }
}

}  // namespace

SvdResult svd_full(const Matrix& a) {
    if (a.empty()) throw ShapeError("svd_full: empty matrix");
    ensure_finite(a, "svd_full input");
    SvdResult r;
    if (a.rows() >= a.cols()) {
        r = svd_tall(a);
    } else {
        SvdResult t = svd_tall(transpose(a));
        r.u = std::move(t.v);
        r.s = std::move(t.s);
        r.v = std::move(t.u);
    }
    enforce_sign_convention(r);
    return r;
}

Matrix pinv(const Matrix& a) {
    if (a.empty()) throw ShapeError("pinv: empty matrix");
    const SvdResult r = svd_full(a);
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const double cutoff = r.s[0] * static_cast<double>(std::max(m, n)) *
                          std::numeric_limits<double>::epsilon();
    Matrix out(n, m);
    for (std::size_t l = 0; l < r.s.size(); ++l) {
        if (r.s[l] <= cutoff) continue;
        const double inv = 1.0 / r.s[l];
        for (std::size_t i = 0; i < n; ++i) {
            const double vi = inv * r.v(i, l);
            if (vi == 0.0) continue;
            for (std::size_t j = 0; j < m; ++j) {
                out(i, j) += vi * r.u(j, l);
            }
        }
    }
    ensure_finite(out, "pinv result");
    return out;
}

Matrix orthogonal_factor(const Matrix& a) {
    if (a.empty()) throw ShapeError("orthogonal_factor: empty matrix");
    const SvdResult r = svd_full(a);
    const std::size_t k = r.s.size();
    Matrix out(a.rows(), a.cols());
    for (std::size_t l = 0; l < k; ++l) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const double ui = r.u(i, l);
            if (ui == 0.0) continue;
            for (std::size_t j = 0; j < a.cols(); ++j) {
                out(i, j) += ui * r.v(j, l);
            }
        }
    }
    ensure_finite(out, "orthogonal_factor result");
    return out;
}

}  // namespace sinlab
