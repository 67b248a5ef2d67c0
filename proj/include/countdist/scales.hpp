#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "countdist/counts.hpp"
#include "countdist/errors.hpp"
#include "countdist/linalg.hpp"
#include "countdist/types.hpp"

namespace countdist {

inline constexpr int kScaleEnumerationCap = 20;  // k = 2^{n-1} columns

/// Scale with pattern p: s_0 = 1, s_{i+1} = s_i * lambda^{p_i}, normalized.
/// Exact in rational mode; float mode works with shifted exponents so the
/// cumulative product can never overflow (far tails flush to zero).
template <class T>
std::vector<T> scale_from_pattern(const PatternT& pattern, const Privacy<T>& p) {
    const int n = static_cast<int>(pattern.size()) + 1;
    std::vector<T> s(n);
    if constexpr (std::is_same_v<T, double>) {
        std::vector<int> expo(n, 0);
        int max_expo = 0;
        for (int i = 0; i + 1 < n; ++i) {
            expo[i + 1] = expo[i] + pattern[i];
            max_expo = std::max(max_expo, expo[i + 1]);
        }
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            s[i] = std::exp(static_cast<double>(expo[i] - max_expo) * p.epsilon);
            total += s[i];
        }
        for (auto& v : s) v /= total;
    } else {
        s[0] = T(1);
        for (int i = 0; i + 1 < n; ++i)
            s[i + 1] = pattern[i] > 0 ? T(s[i] * p.lambda) : T(s[i] * p.lambda_inv);
        T total(0);
        for (const auto& v : s) total += v;
        for (auto& v : s) v /= total;
    }
    return s;
}

/// Canonical scale ordering: the pattern read as an (n-1)-bit integer with
/// p_0 as the most significant bit and +1 as bit value 1. Index 0 is the
/// all-decreasing scale, index 2^{n-1}-1 the all-increasing one.
inline PatternT pattern_from_index(uint64_t index, int n) {
    PatternT p(static_cast<size_t>(n - 1));
    for (int i = 0; i + 1 < n; ++i) {
        const int bit = static_cast<int>((index >> (n - 2 - i)) & 1u);
        p[i] = bit ? int8_t{1} : int8_t{-1};
    }
    return p;
}

inline uint64_t index_from_pattern(const PatternT& p) {
    uint64_t idx = 0;
    for (int8_t sign : p) idx = (idx << 1) | (sign > 0 ? 1u : 0u);
    return idx;
}

/// All k = 2^{n-1} scales as columns of an n x k matrix, canonical order.
template <class T>
Mat<T> enumerate_scales(int n, const Privacy<T>& p, int cap = kScaleEnumerationCap) {
    if (n < 1) throw InputError("enumerate_scales: n must be >= 1");
    if (n > cap) throw CapacityError("enumerate_scales: n exceeds the 2^{n-1} enumeration cap");
    const uint64_t k = uint64_t{1} << (n - 1);
    Mat<T> psi(n, static_cast<int>(k));
    for (uint64_t idx = 0; idx < k; ++idx) {
        const auto s = scale_from_pattern(pattern_from_index(idx, n), p);
        for (int i = 0; i < n; ++i) psi(i, static_cast<int>(idx)) = s[i];
    }
    return psi;
}

/// Rises to a single peak at j, then falls: p_i = +1 for i < j, -1 otherwise.
inline PatternT single_peaked_pattern(int j, int n) {
    if (j < 0 || j > n - 1) throw InputError("single_peaked_pattern: j out of range");
    PatternT p(static_cast<size_t>(n - 1));
    for (int i = 0; i + 1 < n; ++i) p[i] = i < j ? int8_t{1} : int8_t{-1};
    return p;
}

/// n x n matrix whose column l is the single-peaked scale at position l.
template <class T>
Mat<T> single_peaked_matrix(int n, const Privacy<T>& p) {
    Mat<T> sigma(n, n);
    for (int l = 0; l < n; ++l) {
        const auto s = scale_from_pattern(single_peaked_pattern(l, n), p);
        for (int i = 0; i < n; ++i) sigma(i, l) = s[i];
    }
    return sigma;
}

/// The unique positive weights with sum_l omega_l * (single-peaked scale at l)
/// equal to the all-ones vector. The Toeplitz kernel lambda^{-|i-l|} has a
/// tridiagonal inverse, which collapses the solve to one pass:
///   omega_l = Z_l / (1 + a)            for l in {0, n-1}
///   omega_l = Z_l * (1 - a) / (1 + a)  otherwise,
/// with a = lambda^{-1} and Z_l the normalizer of the scale at l.
template <class T>
std::vector<T> solve_row_weights(int n, const Privacy<T>& p) {
    if (n < 1) throw InputError("solve_row_weights: n must be >= 1");
    if (n == 1) return {T(1)};
    const T a = p.lambda_inv;
    std::vector<T> pow(n);
    pow[0] = T(1);
    for (int i = 1; i < n; ++i) pow[i] = pow[i - 1] * a;
    std::vector<T> omega(n);
    for (int l = 0; l < n; ++l) {
        T z_l(0);
        for (int i = 0; i < n; ++i) z_l += pow[std::abs(i - l)];
        const T beta =
            (l == 0 || l == n - 1) ? T(T(1) / (T(1) + a)) : T((T(1) - a) / (T(1) + a));
        omega[l] = z_l * beta;
    }
    return omega;
}

namespace detail {

/// Rank-equals-cardinality test on a multiset of length-n vectors.
template <class T>
bool multiset_linearly_independent(const std::vector<std::vector<T>>& vecs, int n) {
    const int m = static_cast<int>(vecs.size());
    if (m == 0) return true;
    if (m > n) return false;
    Mat<T> mat(m, n);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) mat(r, c) = vecs[r][c];
    if constexpr (std::is_same_v<T, double>) {
        return rank_float(mat, kRankTolFloat) == m;
    } else {
        return rank_exact(std::move(mat)) == m;
    }
}

}  // namespace detail

/// Whether the weighted scale differences h = (z Psi_u)^{-1} Psi_u -
/// (z Psi_v)^{-1} Psi_v, anchored at each column's smallest positive index v,
/// form a linearly independent multiset. Characterizes ex(R_F).
template <class T>
bool psi_affinely_simplified(const Mat<T>& b, const Distribution<T>& z, const Mat<T>& psi) {
    if (b.rows != psi.cols || psi.rows != z.size())
        throw InputError("psi_affinely_simplified: shape mismatch");
    const int n = psi.rows;
    const std::vector<T> z_psi = vecmat(z.p, psi);  // z Psi_j for every scale
    std::vector<std::vector<T>> hs;
    for (int j = 0; j < b.cols; ++j) {
        int anchor = -1;
        for (int i = 0; i < b.rows; ++i) {
            if (b(i, j) > T(0)) {
                anchor = i;
                break;
            }
        }
        if (anchor < 0) continue;
        if (z_psi[anchor] == T(0))
            throw InternalError("psi_affinely_simplified: z Psi vanished on a used scale");
        for (int u = anchor + 1; u < b.rows; ++u) {
            if (!(b(u, j) > T(0))) continue;
            std::vector<T> h(n);
            for (int r = 0; r < n; ++r)
                h[r] = psi(r, u) / z_psi[u] - psi(r, anchor) / z_psi[anchor];
            hs.push_back(std::move(h));
        }
    }
    return detail::multiset_linearly_independent(hs, n);
}

/// Whether the scales selected by positive coefficients form a linearly
/// independent multiset (a scale used in two columns repeats and fails).
/// Characterizes ex(R_U).
template <class T>
bool psi_linearly_simplified(const Mat<T>& b, const Mat<T>& psi) {
    if (b.rows != psi.cols) throw InputError("psi_linearly_simplified: shape mismatch");
    const int n = psi.rows;
    std::vector<bool> seen(static_cast<size_t>(b.rows), false);
    std::vector<std::vector<T>> picked;
    for (int j = 0; j < b.cols; ++j) {
        for (int u = 0; u < b.rows; ++u) {
            if (!(b(u, j) > T(0))) continue;
            if (seen[u]) return false;  // repeated vector in the multiset
            seen[u] = true;
            std::vector<T> col(n);
            for (int r = 0; r < n; ++r) col[r] = psi(r, u);
            picked.push_back(std::move(col));
        }
    }
    return detail::multiset_linearly_independent(picked, n);
}

}  // namespace countdist
