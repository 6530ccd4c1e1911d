#pragma once
// linalg.hpp -- exact dense linear algebra over the rationals.
// Small matrices only; everything is deterministic (first-nonzero pivoting).

#include "rat.hpp"

#include <optional>
#include <vector>

namespace diffeolab {

using Vec = std::vector<Rat>;
using Mat = std::vector<Vec>;  // row-major, rectangular

inline Mat mat_zero(size_t r, size_t c) { return Mat(r, Vec(c, Rat(0))); }

inline Mat mat_identity(size_t n) {
    Mat m = mat_zero(n, n);
    for (size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline size_t mat_cols(const Mat& m) { return m.empty() ? 0 : m[0].size(); }

inline Mat mat_transpose(const Mat& m) {
    Mat t = mat_zero(mat_cols(m), m.size());
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
    return t;
}

inline Mat mat_mul(const Mat& a, const Mat& b) {
    Mat r = mat_zero(a.size(), mat_cols(b));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t k = 0; k < b.size(); ++k)
            if (a[i][k] != 0)
                for (size_t j = 0; j < b[k].size(); ++j) r[i][j] += a[i][k] * b[k][j];
    return r;
}

inline Vec mat_apply(const Mat& a, const Vec& x) {
    Vec r(a.size(), Rat(0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < x.size(); ++j) r[i] += a[i][j] * x[j];
    return r;
}

inline bool vec_is_zero(const Vec& v) {
    for (const Rat& x : v)
        if (x != 0) return false;
    return true;
}

// In-place reduced row echelon form; returns pivot column indices.
// Deterministic: scans rows top-down, picks the first row with a nonzero
// entry in the current column.
inline std::vector<size_t> rref(Mat& m) {
    std::vector<size_t> pivots;
    if (m.empty()) return pivots;
    size_t rows = m.size(), cols = m[0].size(), r = 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t sel = rows;
        for (size_t i = r; i < rows; ++i)
            if (m[i][c] != 0) { sel = i; break; }
        if (sel == rows) continue;
        std::swap(m[sel], m[r]);
        Rat inv = Rat(1) / m[r][c];
        for (size_t j = c; j < cols; ++j) m[r][j] *= inv;
        for (size_t i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rat f = m[i][c];
            for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline size_t mat_rank(Mat m) { return rref(m).size(); }

// Canonical basis of {x : m x = 0}: free-column construction followed by a
// second RREF pass so the rows come out in reduced row-echelon order.
inline Mat kernel_basis(Mat m, size_t cols) {
    if (m.empty()) return mat_identity(cols);
    std::vector<size_t> piv = rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (size_t c : piv) is_pivot[c] = true;
    Mat basis;
    for (size_t c = 0; c < cols; ++c) {
        if (is_pivot[c]) continue;
        Vec v(cols, Rat(0));
        v[c] = 1;
        for (size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -m[i][c];
        basis.push_back(std::move(v));
    }
    rref(basis);
    return basis;
}

// Particular solution of a x = b, or nullopt when inconsistent.
inline std::optional<Vec> solve(Mat a, const Vec& b) {
    size_t cols = mat_cols(a);
    for (size_t i = 0; i < a.size(); ++i) a[i].push_back(b[i]);
    std::vector<size_t> piv = rref(a);
    for (size_t i = 0; i < a.size(); ++i) {
        bool lhs_zero = true;
        for (size_t j = 0; j < cols; ++j)
            if (a[i][j] != 0) { lhs_zero = false; break; }
        if (lhs_zero && a[i][cols] != 0) return std::nullopt;
    }
    Vec x(cols, Rat(0));
    for (size_t i = 0; i < piv.size(); ++i)
        if (piv[i] < cols) x[piv[i]] = a[i][cols];
    return x;
}

// True when v lies in the row span of basis.
inline bool in_span(const Mat& basis, const Vec& v) {
    if (vec_is_zero(v)) return true;
    Mat m = basis;
    m.push_back(v);
    return mat_rank(std::move(m)) == mat_rank(basis);
}

struct PsdResult {
    bool psd = true;
    size_t rank = 0;
    std::string reason;  // set when not psd
};

// Exact LDL^T with symmetric diagonal pivoting.  A symmetric matrix is PSD
// iff the elimination never meets a negative pivot and never leaves a zero
// diagonal with a nonzero residual row.
inline PsdResult psd_rank(Mat a) {
    PsdResult res;
    size_t n = a.size();
    std::vector<bool> done(n, false);
    for (;;) {
        size_t p = n;
        for (size_t i = 0; i < n; ++i)
            if (!done[i] && a[i][i] != 0) { p = i; break; }
        if (p == n) break;
        if (a[p][p] < 0) {
            res.psd = false;
            res.reason = "negative diagonal pivot at index " + std::to_string(p + 1);
            return res;
        }
        ++res.rank;
        done[p] = true;
        for (size_t i = 0; i < n; ++i) {
            if (done[i] || a[i][p] == 0) continue;
            Rat f = a[i][p] / a[p][p];
            for (size_t j = 0; j < n; ++j)
                if (!done[j]) a[i][j] -= f * a[p][j];
            a[i][p] = 0;
            a[p][i] = 0;
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        for (size_t j = 0; j < n; ++j) {
            if (!done[j] && a[i][j] != 0) {
                res.psd = false;
                res.reason = "zero diagonal with nonzero residual at index " +
                             std::to_string(i + 1);
                return res;
            }
        }
    }
    return res;
}

}  // namespace diffeolab
