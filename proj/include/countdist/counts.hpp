#pragma once

#include <cstdint>
#include <type_traits>
#include <vector>

#include "countdist/errors.hpp"
#include "countdist/linalg.hpp"
#include "countdist/rng.hpp"
#include "countdist/types.hpp"

namespace countdist {

template <class T>
constexpr T default_membership_tol() {
    if constexpr (std::is_same_v<T, double>) return 1e-9;
    else return T(0);
}

inline constexpr double kRankTolFloat = 1e-8;

inline Histogram histogram_of(const CountTable& table, int n) {
    if (n < 1) throw InputError("histogram_of: n must be >= 1");
    if (table.counts.empty()) throw InputError("histogram_of: empty table");
    Histogram h;
    h.bins.assign(n, 0);
    for (int64_t c : table.counts) {
        if (c < 0) throw InputError("histogram_of: negative count");
        h.bins[static_cast<size_t>(c >= n ? n - 1 : c)] += 1;
    }
    return h;
}

template <class T = double>
Distribution<T> distribution_of(const Histogram& h) {
    int64_t total = 0;
    for (int64_t b : h.bins) total += b;
    if (total <= 0) throw InputError("distribution_of: histogram sums to zero");
    Distribution<T> d;
    d.p.reserve(h.bins.size());
    for (int64_t b : h.bins) d.p.push_back(T(b) / T(total));
    return d;
}

/// e^{-eps} v_{i+1} <= v_i <= e^{eps} v_{i+1} for every adjacent pair, with
/// relative slack tol in float mode. The all-zero vector passes (equalities).
/// Float mode also grants a deep-underflow absolute slack: probability tails
/// proportional to lambda^{-k} flush to zero once k eps passes ~745, and a
/// hard zero next to a subnormal is a rounding artifact, not a violation.
template <class T>
bool neighbor_indistinguishable(const std::vector<T>& v, const Privacy<T>& p,
                                const T tol = default_membership_tol<T>()) {
    const int n = static_cast<int>(v.size());
    T underflow_slack(0);
    if constexpr (std::is_same_v<T, double>) {
        if (tol > 0) underflow_slack = 1e-270;
    }
    for (int i = 0; i + 1 < n; ++i) {
        const T hi = p.lambda * v[i + 1];
        const T lo = p.lambda_inv * v[i + 1];
        const T slack = tol * std::max({abs_val(v[i]), abs_val(hi), abs_val(lo)}) + underflow_slack;
        if (v[i] > hi + slack) return false;
        if (v[i] < lo - slack) return false;
    }
    return true;
}

template <class T>
bool is_row_stochastic(const TransitionMatrix<T>& t, const T tol = default_membership_tol<T>()) {
    if (t.rows != t.cols) return false;
    for (int i = 0; i < t.rows; ++i) {
        T sum(0);
        for (int j = 0; j < t.cols; ++j) {
            if (t(i, j) < -tol) return false;
            sum += t(i, j);
        }
        if (abs_val(T(sum - T(1))) > tol) return false;
    }
    return true;
}

/// Membership in U: row-stochastic with every column neighbor-indistinguishable.
template <class T>
bool in_U(const TransitionMatrix<T>& t, const Privacy<T>& p,
          const T tol = default_membership_tol<T>()) {
    if (!is_row_stochastic(t, tol)) return false;
    std::vector<T> col(t.rows);
    for (int j = 0; j < t.cols; ++j) {
        for (int i = 0; i < t.rows; ++i) col[i] = t(i, j);
        if (!neighbor_indistinguishable(col, p, tol)) return false;
    }
    return true;
}

/// Membership in F: additionally zT = z.
template <class T>
bool in_F(const TransitionMatrix<T>& t, const Distribution<T>& z, const Privacy<T>& p,
          const T tol = default_membership_tol<T>()) {
    if (t.rows != z.size()) throw InputError("in_F: dimension mismatch");
    if (!in_U(t, p, tol)) return false;
    const std::vector<T> zt = vecmat(z.p, t);
    for (int j = 0; j < t.cols; ++j) {
        if (abs_val(T(zt[j] - z.p[j])) > tol * std::max(T(1), abs_val(z.p[j]))) return false;
    }
    return true;
}

/// Gradients of all binding constraints, one row per constraint, vectorized
/// over the n^2 matrix coordinates (row-major). Pass z for the F polytope.
template <class T>
Mat<T> binding_constraints(const TransitionMatrix<T>& t, const Distribution<T>* z,
                           const Privacy<T>& p, const T tol) {
    const int n = t.rows;
    const int nn = n * n;
    std::vector<std::vector<T>> rows;

    for (int i = 0; i < n; ++i) {  // row sums always bind for members
        std::vector<T> row(nn, T(0));
        for (int j = 0; j < n; ++j) row[i * n + j] = T(1);
        rows.push_back(std::move(row));
    }
    if (z) {
        for (int j = 0; j < n; ++j) {  // fixed-point equalities
            std::vector<T> row(nn, T(0));
            for (int i = 0; i < n; ++i) row[i * n + j] = z->p[i];
            rows.push_back(std::move(row));
        }
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (abs_val(t(i, j)) <= tol) {
                std::vector<T> row(nn, T(0));
                row[i * n + j] = T(1);
                rows.push_back(std::move(row));
            }
        }
        for (int i = 0; i + 1 < n; ++i) {
            const T upper_gap = t(i, j) - p.lambda * t(i + 1, j);
            const T lower_gap = t(i, j) - p.lambda_inv * t(i + 1, j);
            const T scale = std::max({abs_val(t(i, j)), abs_val(T(p.lambda * t(i + 1, j))), T(0)});
            if (abs_val(upper_gap) <= tol * std::max(T(1), scale)) {
                std::vector<T> row(nn, T(0));
                row[i * n + j] = T(1);
                row[(i + 1) * n + j] = -p.lambda;
                rows.push_back(std::move(row));
            }
            if (abs_val(lower_gap) <= tol * std::max(T(1), scale)) {
                std::vector<T> row(nn, T(0));
                row[i * n + j] = T(1);
                row[(i + 1) * n + j] = -p.lambda_inv;
                rows.push_back(std::move(row));
            }
        }
    }

    Mat<T> m(static_cast<int>(rows.size()), nn);
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < nn; ++c) m(r, c) = rows[r][c];
    return m;
}

template <class T>
bool binding_rank_full(const Mat<T>& constraints, int target) {
    if constexpr (std::is_same_v<T, double>) {
        return rank_float(constraints, kRankTolFloat) >= target;
    } else {
        return rank_is_at_least(constraints, target);
    }
}

/// Extreme point of U: membership is checked first and failure is an error,
/// never a silent "not extreme".
template <class T>
bool is_extreme_in_U(const TransitionMatrix<T>& t, const Privacy<T>& p,
                     const T tol = default_membership_tol<T>()) {
    if (!in_U(t, p, tol)) throw MembershipError("is_extreme_in_U: matrix is not in U");
    const Mat<T> c = binding_constraints<T>(t, nullptr, p, tol);
    return binding_rank_full(c, t.rows * t.rows);
}

template <class T>
bool is_extreme_in_F(const TransitionMatrix<T>& t, const Distribution<T>& z, const Privacy<T>& p,
                     const T tol = default_membership_tol<T>()) {
    if (!in_F(t, z, p, tol)) throw MembershipError("is_extreme_in_F: matrix is not in F");
    const Mat<T> c = binding_constraints<T>(t, &z, p, tol);
    return binding_rank_full(c, t.rows * t.rows);
}

/// Runs every row of the table through the count mechanism. Row i draws from
/// its own stream derived from (seed, i), so the result is independent of
/// processing order.
inline CountTable apply_mechanism(const CountTable& table, const TransitionMatrix<double>& t,
                                  uint64_t seed) {
    if (t.rows != t.cols || t.rows != table.n)
        throw InputError("apply_mechanism: transition matrix does not match table's n");
    CountTable out = table;
    const int n = t.rows;
    for (int64_t i = 0; i < table.size(); ++i) {
        const int64_t d = table.counts[i];
        Rng rng(derive_stream_seed(seed, static_cast<uint64_t>(i)));
        const double u = rng.uniform01();
        double acc = 0.0;
        int drawn = n - 1;
        for (int j = 0; j < n; ++j) {
            acc += t(static_cast<int>(d), j);
            if (u < acc) {
                drawn = j;
                break;
            }
        }
        out.counts[i] = drawn;
    }
    return out;
}

}  // namespace countdist
