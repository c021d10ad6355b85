#include "mdm/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace mdm {

void CsrMatrix::multiply(const double* x, double* y) const {
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) acc += values[p] * x[col_idx[p]];
        y[i] = acc;
    }
}

void CsrBuilder::add(int row, int col, double v) {
    if (row < 0 || row >= n_ || col < 0 || col >= n_)
        throw std::out_of_range("triplet index outside matrix");
    if (row == col) {
        diag_[row] += v;
        return;
    }
    off_[row].emplace_back(col, v);
}

CsrMatrix CsrBuilder::build() const {
    CsrMatrix m;
    m.n = n_;
    m.row_ptr.assign(n_ + 1, 0);
    std::vector<std::pair<int, double>> row;
    for (int i = 0; i < n_; ++i) {
        row.assign(off_[i].begin(), off_[i].end());
        std::sort(row.begin(), row.end());
        // merge duplicates, keep the diagonal in-place at its sorted position
        std::size_t w = 0;
        for (std::size_t r = 0; r < row.size(); ++r) {
            if (w > 0 && row[w - 1].first == row[r].first)
                row[w - 1].second += row[r].second;
            else
                row[w++] = row[r];
        }
        row.resize(w);
        bool diag_done = false;
        for (const auto& [c, v] : row) {
            if (!diag_done && c > i) {
                m.col_idx.push_back(i);
                m.values.push_back(diag_[i]);
                diag_done = true;
            }
            m.col_idx.push_back(c);
            m.values.push_back(v);
        }
        if (!diag_done) {
            m.col_idx.push_back(i);
            m.values.push_back(diag_[i]);
        }
        m.row_ptr[i + 1] = static_cast<int>(m.col_idx.size());
    }
    return m;
}

CgResult pcg_solve(const CsrMatrix& a, const std::vector<double>& b, double tol,
                   int max_iterations) {
    const int n = a.n;
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("right-hand side does not match matrix size");
    CgResult result;
    result.x.assign(n, 0.0);
    if (n == 0) return result;

    double b_norm = 0.0;
    for (double v : b) b_norm += v * v;
    b_norm = std::sqrt(b_norm);
    if (b_norm == 0.0) return result;

    if (max_iterations < 0)
        max_iterations = static_cast<int>(50.0 * std::sqrt(static_cast<double>(n))) + 10;

    std::vector<double> inv_diag(n, 1.0);
    for (int i = 0; i < n; ++i)
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
            if (a.col_idx[p] == i && a.values[p] != 0.0) inv_diag[i] = 1.0 / a.values[p];

    std::vector<double> r = b;            // residual (x0 = 0)
    std::vector<double> z(n), p(n), ap(n);
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = 0.0;
    for (int i = 0; i < n; ++i) rz += r[i] * z[i];

    // |b - Ax| recomputed explicitly; fills `out` with the exact residual.
    auto exact_residual = [&](std::vector<double>& out) {
        a.multiply(result.x.data(), out.data());
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            out[i] = b[i] - out[i];
            s += out[i] * out[i];
        }
        return std::sqrt(s);
    };

    double r_norm = b_norm;
    double last_verified = b_norm;  // exact residual at the previous restart
    int it = 0;
    while (true) {
        if (r_norm <= tol * b_norm) {
            // The recurrence residual drifts optimistic near the rounding
            // floor, so confirm on the recomputed one before declaring done.
            std::vector<double> exact(n);
            const double e_norm = exact_residual(exact);
            if (e_norm <= tol * b_norm) {
                result.residual = e_norm / b_norm;
                result.iterations = it;
                return result;
            }
            if (e_norm >= 0.5 * last_verified)
                throw SolverError("conjugate gradient stagnated at relative residual " +
                                      std::to_string(e_norm / b_norm),
                                  e_norm / b_norm, it);
            // restart from the exact residual and keep iterating
            last_verified = e_norm;
            r = std::move(exact);
            rz = 0.0;
            for (int i = 0; i < n; ++i) {
                z[i] = inv_diag[i] * r[i];
                rz += r[i] * z[i];
            }
            p = z;
            r_norm = e_norm;
        }
        if (it >= max_iterations)
            throw SolverError("conjugate gradient failed to converge: relative residual " +
                                  std::to_string(r_norm / b_norm) + " after " +
                                  std::to_string(it) + " iterations",
                              r_norm / b_norm, it);
        a.multiply(p.data(), ap.data());
        double pap = 0.0;
        for (int i = 0; i < n; ++i) pap += p[i] * ap[i];
        if (pap <= 0.0)
            throw SolverError("conductance system lost positive definiteness", r_norm / b_norm,
                              it);
        const double alpha = rz / pap;
        for (int i = 0; i < n; ++i) {
            result.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rz_next = 0.0;
        r_norm = 0.0;
        for (int i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
            rz_next += r[i] * z[i];
            r_norm += r[i] * r[i];
        }
        r_norm = std::sqrt(r_norm);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        ++it;
    }
}

std::vector<double> ldlt_solve(const CsrMatrix& a, const std::vector<double>& b) {
    const int n = a.n;
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("right-hand side does not match matrix size");
    if (n == 0) return {};

    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
            m[static_cast<std::size_t>(i) * n + a.col_idx[p]] += a.values[p];

    // in-place right-looking LDL^T on the lower triangle: L strictly below the
    // diagonal (unit diagonal implied), D on the diagonal
    std::vector<double> colk(n);
    for (int k = 0; k < n; ++k) {
        const double d = m[static_cast<std::size_t>(k) * n + k];
        if (!(d > 0.0))
            throw SolverError("dense factorization hit a non-positive pivot", 0.0, k);
        for (int i = k + 1; i < n; ++i) colk[i] = m[static_cast<std::size_t>(i) * n + k];
        for (int i = k + 1; i < n; ++i) {
            double* ri = &m[static_cast<std::size_t>(i) * n];
            const double l = colk[i] / d;
            for (int c = k + 1; c <= i; ++c) ri[c] -= l * colk[c];
            ri[k] = l;
        }
    }

    std::vector<double> x = b;
    for (int i = 0; i < n; ++i) {
        const double* ri = &m[static_cast<std::size_t>(i) * n];
        double acc = x[i];
        for (int c = 0; c < i; ++c) acc -= ri[c] * x[c];
        x[i] = acc;
    }
    for (int i = 0; i < n; ++i) x[i] /= m[static_cast<std::size_t>(i) * n + i];
    for (int i = n - 1; i >= 0; --i) {
        double acc = x[i];
        for (int c = i + 1; c < n; ++c) acc -= m[static_cast<std::size_t>(c) * n + i] * x[c];
        x[i] = acc;
    }
    return x;
}

}  // namespace mdm
