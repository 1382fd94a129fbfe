#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace resolv::detail {

/// Dense row-major matrix, sized for alphabet-scale systems (a handful of
/// rows/columns), not for serious linear algebra.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

namespace impl {

// In-place Householder QR. Returns the diagonal magnitudes of R; `a` holds
// the reflectors below the diagonal and R on/above it.
inline std::vector<double> householder_qr(Matrix& a,
                                          std::vector<double>* rhs) {
    const std::size_t m = a.rows, n = a.cols;
    const std::size_t steps = std::min(m, n);
    std::vector<double> diag(steps, 0.0);
    for (std::size_t k = 0; k < steps; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += a.at(i, k) * a.at(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            diag[k] = 0.0;
            continue;
        }
        if (a.at(k, k) > 0.0) norm = -norm;
        for (std::size_t i = k; i < m; ++i) a.at(i, k) /= -norm;
        a.at(k, k) += 1.0;
        for (std::size_t j = k + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += a.at(i, k) * a.at(i, j);
            s = -s / a.at(k, k);
            for (std::size_t i = k; i < m; ++i) a.at(i, j) += s * a.at(i, k);
        }
        if (rhs != nullptr) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += a.at(i, k) * (*rhs)[i];
            s = -s / a.at(k, k);
            for (std::size_t i = k; i < m; ++i) (*rhs)[i] += s * a.at(i, k);
        }
        diag[k] = norm;
    }
    return diag;
}

}  // namespace impl

/// Numerical rank with column pivoting; a pivot counts while its magnitude
/// exceeds rel_tol times the largest pivot.
inline int matrix_rank(Matrix a, double rel_tol) {
    const std::size_t m = a.rows, n = a.cols;
    std::vector<double> col_norm(n, 0.0);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < m; ++i)
            col_norm[j] += a.at(i, j) * a.at(i, j);

    int rank = 0;
    double first_pivot = 0.0;
    const std::size_t steps = std::min(m, n);
    for (std::size_t k = 0; k < steps; ++k) {
        std::size_t best = k;
        for (std::size_t j = k + 1; j < n; ++j)
            if (col_norm[j] > col_norm[best]) best = j;
        if (best != k) {
            for (std::size_t i = 0; i < m; ++i)
                std::swap(a.at(i, k), a.at(i, best));
            std::swap(col_norm[k], col_norm[best]);
        }
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += a.at(i, k) * a.at(i, k);
        norm = std::sqrt(norm);
        if (k == 0) first_pivot = norm;
        if (norm <= rel_tol * first_pivot || norm == 0.0) break;
        ++rank;
        if (a.at(k, k) > 0.0) norm = -norm;
        for (std::size_t i = k; i < m; ++i) a.at(i, k) /= -norm;
        a.at(k, k) += 1.0;
        for (std::size_t j = k + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += a.at(i, k) * a.at(i, j);
            s = -s / a.at(k, k);
            for (std::size_t i = k; i < m; ++i) a.at(i, j) += s * a.at(i, k);
        }
        a.at(k, k) = -norm;  // stash R_kk
        for (std::size_t j = 0; j < n; ++j) {
            if (j <= k) continue;
            col_norm[j] -= a.at(k, j) * a.at(k, j);
            if (col_norm[j] < 0.0) col_norm[j] = 0.0;
        }
    }
    return rank;
}

/// Least-squares solve of A x = b (m >= n). Returns nullopt when A is
/// numerically column-rank-deficient at rel_tol.
inline std::optional<std::vector<double>> solve_least_squares(
    Matrix a, std::vector<double> b, double rel_tol = 1e-12) {
    const std::size_t m = a.rows, n = a.cols;
    if (m < n || b.size() != m) return std::nullopt;
    std::vector<double> diag = impl::householder_qr(a, &b);
    double max_diag = 0.0;
    for (double d : diag) max_diag = std::max(max_diag, std::abs(d));
    if (max_diag == 0.0) return std::nullopt;
    for (double d : diag)
        if (std::abs(d) <= rel_tol * max_diag) return std::nullopt;

    std::vector<double> x(n, 0.0);
    for (std::size_t kk = n; kk-- > 0;) {
        double s = b[kk];
        for (std::size_t j = kk + 1; j < n; ++j) s -= a.at(kk, j) * x[j];
        x[kk] = s / diag[kk];
    }
    return x;
}

/// Singular values via Jacobi iteration on A^T A. Adequate for the tiny
/// constraint systems this library builds.
inline std::vector<double> singular_values(const Matrix& a) {
    const std::size_t n = a.cols;
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.rows; ++k)
                acc += a.at(k, i) * a.at(k, j);
            s.at(i, j) = acc;
        }

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::abs(s.at(p, q));
        if (off < 1e-15) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(s.at(p, q)) < 1e-18) continue;
                const double theta =
                    (s.at(q, q) - s.at(p, p)) / (2.0 * s.at(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) +
                                  std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = s.at(k, p), skq = s.at(k, q);
                    s.at(k, p) = c * skp - sn * skq;
                    s.at(k, q) = sn * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = s.at(p, k), sqk = s.at(q, k);
                    s.at(p, k) = c * spk - sn * sqk;
                    s.at(q, k) = sn * spk + c * sqk;
                }
            }
        }
    }
    std::vector<double> sv(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        sv[i] = std::sqrt(std::max(0.0, s.at(i, i)));
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

}  // namespace resolv::detail
