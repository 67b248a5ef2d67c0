#pragma once

#include <algorithm>
#include <cmath>
#include <type_traits>
#include <vector>

#include "countdist/errors.hpp"
#include "countdist/linalg.hpp"
#include "countdist/types.hpp"

namespace countdist {

enum class DistanceKind { kWasserstein1, kKs, kTv };

/// Distances between two distributions on the unit-spaced support {0,...,n-1}.
inline double distribution_distance(const Distribution<double>& a, const Distribution<double>& b,
                                    DistanceKind kind) {
    if (a.size() != b.size()) throw InputError("distribution_distance: length mismatch");
    const int n = a.size();
    switch (kind) {
        case DistanceKind::kTv: {
            double sum = 0.0;
            for (int i = 0; i < n; ++i) sum += std::fabs(a.p[i] - b.p[i]);
            return 0.5 * sum;
        }
        case DistanceKind::kWasserstein1:
        case DistanceKind::kKs: {
            double cdf_gap_sum = 0.0, cdf_gap_max = 0.0, ca = 0.0, cb = 0.0;
            for (int i = 0; i < n; ++i) {
                ca += a.p[i];
                cb += b.p[i];
                const double gap = std::fabs(ca - cb);
                cdf_gap_sum += gap;
                cdf_gap_max = std::max(cdf_gap_max, gap);
            }
            return kind == DistanceKind::kWasserstein1 ? cdf_gap_sum : cdf_gap_max;
        }
    }
    throw InputError("distribution_distance: unknown kind");
}

enum class ErrorKind { kEad, kMse };

/// w_{ij} = z_i |i-j| (expected absolute deviation) or z_i (i-j)^2 (MSE).
template <class T>
Mat<T> build_weight_matrix(ErrorKind kind, const Distribution<T>& z) {
    const int n = z.size();
    Mat<T> w(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int d = i > j ? i - j : j - i;
            w(i, j) = kind == ErrorKind::kEad ? T(z.p[i] * T(d)) : T(z.p[i] * T(d) * T(d));
        }
    }
    return w;
}

namespace detail {

/// Slack for the weight-class validators: zero in exact mode, a relative
/// epsilon in float mode so w_{ij} = z_i |i-j| style products do not trip on
/// last-bit rounding.
template <class T>
T validator_slack(const T& a, const T& b) {
    if constexpr (std::is_same_v<T, double>) {
        return 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
    } else {
        (void)a;
        (void)b;
        return T(0);
    }
}

}  // namespace detail

/// w_{i,j} non-decreasing in |i-j| for each row.
template <class T>
bool validate_row_wise_concentrating(const Mat<T>& w) {
    const int n = w.rows;
    if (w.cols != n) throw InputError("weight validator: matrix must be square");
    for (int i = 0; i < n; ++i) {
        bool have_prev = false;
        T running_max(0);
        for (int d = 0; d < n; ++d) {
            // Entries at distance exactly d from the diagonal in row i.
            bool have_cur = false;
            T cur_min(0), cur_max(0);
            for (const int j : {i - d, i + d}) {
                if (j < 0 || j >= n || (d == 0 && j != i)) continue;
                const T& v = w(i, j);
                if (!have_cur) {
                    cur_min = cur_max = v;
                    have_cur = true;
                } else {
                    cur_min = std::min(cur_min, v);
                    cur_max = std::max(cur_max, v);
                }
            }
            if (!have_cur) continue;
            if (have_prev && cur_min < running_max - detail::validator_slack(cur_min, running_max))
                return false;
            running_max = have_prev ? std::max(running_max, cur_max) : cur_max;
            have_prev = true;
        }
    }
    return true;
}

/// w_{i,j+1} - w_{i,j} non-decreasing in j for each row.
template <class T>
bool validate_row_wise_convex(const Mat<T>& w) {
    const int n = w.rows;
    if (w.cols != n) throw InputError("weight validator: matrix must be square");
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j + 2 < n; ++j) {
            const T d1 = w(i, j + 1) - w(i, j);
            const T d2 = w(i, j + 2) - w(i, j + 1);
            if (d2 < d1 - detail::validator_slack(d1, d2)) return false;
        }
    }
    return true;
}

/// Frobenius inner product <W, T>.
template <class T>
T count_error(const Mat<T>& w, const Mat<T>& t) {
    if (w.rows != t.rows || w.cols != t.cols) throw InputError("count_error: shape mismatch");
    T total(0);
    for (size_t i = 0; i < w.a.size(); ++i) total += w.a[i] * t.a[i];
    return total;
}

/// Per-bin variance of the output distribution of counts for a table of N
/// categories drawn through T: (1/N) sum_l zeta_l t_{l,j} (1 - t_{l,j}).
/// Reduces to (1/N)(zeta_j - sum_l zeta_l t_{l,j}^2) when zeta T = zeta.
inline std::vector<double> analytic_output_variance(const Distribution<double>& zeta,
                                                    const TransitionMatrix<double>& t, int64_t N) {
    if (t.rows != zeta.size() || t.cols != zeta.size())
        throw InputError("analytic_output_variance: shape mismatch");
    if (N < 1) throw InputError("analytic_output_variance: N must be >= 1");
    std::vector<double> var(static_cast<size_t>(t.cols), 0.0);
    for (int j = 0; j < t.cols; ++j) {
        double s = 0.0;
        for (int l = 0; l < t.rows; ++l) s += zeta.p[l] * t(l, j) * (1.0 - t(l, j));
        var[j] = s / static_cast<double>(N);
    }
    return var;
}

}  // namespace countdist
