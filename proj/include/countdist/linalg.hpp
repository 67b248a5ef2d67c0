#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "countdist/errors.hpp"
#include "countdist/rational.hpp"

namespace countdist {

template <class T>
T abs_val(const T& x) {
    return x < T(0) ? T(-x) : x;
}

/// Dense row-major matrix over an arbitrary scalar (double or Rational).
template <class T>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<T> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, T(0)) {}

    T& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    bool operator==(const Mat& other) const {
        return rows == other.rows && cols == other.cols && a == other.a;
    }
    bool operator<(const Mat& other) const {
        if (rows != other.rows) return rows < other.rows;
        if (cols != other.cols) return cols < other.cols;
        for (size_t i = 0; i < a.size(); ++i) {
            if (a[i] != other.a[i]) return a[i] < other.a[i];
        }
        return false;
    }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }
};

template <class T>
Mat<T> matmul(const Mat<T>& x, const Mat<T>& y) {
    if (x.cols != y.rows) throw InputError("matmul: shape mismatch");
    Mat<T> out(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int k = 0; k < x.cols; ++k) {
            const T& xik = x(i, k);
            if (xik == T(0)) continue;
            for (int j = 0; j < y.cols; ++j) out(i, j) += xik * y(k, j);
        }
    }
    return out;
}

/// Row vector times matrix.
template <class T>
std::vector<T> vecmat(const std::vector<T>& v, const Mat<T>& m) {
    if (static_cast<int>(v.size()) != m.rows) throw InputError("vecmat: shape mismatch");
    std::vector<T> out(m.cols, T(0));
    for (int i = 0; i < m.rows; ++i) {
        if (v[i] == T(0)) continue;
        for (int j = 0; j < m.cols; ++j) out[j] += v[i] * m(i, j);
    }
    return out;
}

/// Exact rank via fraction-aware Gaussian elimination. Destroys its argument.
inline int rank_exact_inplace(Mat<Rational>& m) {
    int rank = 0;
    int row = 0;
    for (int col = 0; col < m.cols && row < m.rows; ++col) {
        int pivot = -1;
        for (int r = row; r < m.rows; ++r) {
            if (m(r, col) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        if (pivot != row) {
            for (int j = col; j < m.cols; ++j) std::swap(m(row, j), m(pivot, j));
        }
        const Rational inv = 1 / m(row, col);
        for (int r = row + 1; r < m.rows; ++r) {
            if (m(r, col) == 0) continue;
            const Rational f = m(r, col) * inv;
            m(r, col) = 0;
            for (int j = col + 1; j < m.cols; ++j) m(r, j) -= f * m(row, j);
        }
        ++row;
        ++rank;
    }
    return rank;
}

inline int rank_exact(Mat<Rational> m) { return rank_exact_inplace(m); }

namespace detail {

inline uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t p) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

inline uint64_t powmod_u64(uint64_t base, uint64_t exp, uint64_t p) {
    uint64_t result = 1;
    base %= p;
    while (exp) {
        if (exp & 1) result = mulmod_u64(result, base, p);
        base = mulmod_u64(base, base, p);
        exp >>= 1;
    }
    return result;
}

/// Rank of the matrix reduced mod a prime. Always <= the rational rank, so a
/// full-rank result is a sound certificate. Returns -1 when a denominator is
/// divisible by p (caller should retry with another prime).
inline int rank_mod_p(const Mat<Rational>& m, uint64_t p) {
    const int rows = m.rows, cols = m.cols;
    std::vector<uint64_t> a(static_cast<size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const Rational& q = m(i, j);
            const uint64_t den = mpz_fdiv_ui(q.get_den().get_mpz_t(), p);
            if (den == 0) return -1;
            // fdiv remainders are already in [0, p), negatives included.
            const uint64_t num = mpz_fdiv_ui(q.get_num().get_mpz_t(), p);
            a[static_cast<size_t>(i) * cols + j] =
                mulmod_u64(num, powmod_u64(den, p - 2, p), p);
        }
    }
    int rank = 0, row = 0;
    for (int col = 0; col < cols && row < rows; ++col) {
        int pivot = -1;
        for (int r = row; r < rows; ++r) {
            if (a[static_cast<size_t>(r) * cols + col] != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        if (pivot != row) {
            for (int j = col; j < cols; ++j)
                std::swap(a[static_cast<size_t>(pivot) * cols + j],
                          a[static_cast<size_t>(row) * cols + j]);
        }
        const uint64_t inv = powmod_u64(a[static_cast<size_t>(row) * cols + col], p - 2, p);
        for (int r = row + 1; r < rows; ++r) {
            const uint64_t f = mulmod_u64(a[static_cast<size_t>(r) * cols + col], inv, p);
            if (f == 0) continue;
            a[static_cast<size_t>(r) * cols + col] = 0;
            for (int j = col + 1; j < cols; ++j) {
                uint64_t& cell = a[static_cast<size_t>(r) * cols + j];
                const uint64_t sub = mulmod_u64(f, a[static_cast<size_t>(row) * cols + j], p);
                cell = cell >= sub ? cell - sub : cell + p - sub;
            }
        }
        ++row;
        ++rank;
    }
    return rank;
}

}  // namespace detail

/// Exact rank with a fast path: if the reduction mod a large prime already has
/// the target rank, that certifies the rational rank (it can only drop mod p).
/// Anything short of the target falls back to exact elimination.
inline bool rank_is_at_least(const Mat<Rational>& m, int target) {
    static constexpr uint64_t kPrimes[] = {2305843009213693951ULL,  // 2^61 - 1
                                           4611686018427387847ULL};
    for (uint64_t p : kPrimes) {
        const int r = detail::rank_mod_p(m, p);
        if (r >= target) return true;
        if (r >= 0) break;  // a genuine sub-target rank mod p; verify exactly
    }
    return rank_exact(m) >= target;
}

/// Float rank: count singular values above tol * sigma_max.
inline int rank_float(const Mat<double>& m, double tol) {
    if (m.rows == 0 || m.cols == 0) return 0;
    Eigen::MatrixXd em(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) em(i, j) = m(i, j);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(em);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = tol * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff && sv(i) > 0.0) ++rank;
    }
    return rank;
}

/// Solves the exact linear system A x = b.
/// Returns nullopt when inconsistent; throws InternalError when underdetermined
/// and `require_unique`, otherwise free variables are pinned to zero.
inline std::optional<std::vector<Rational>> solve_exact(Mat<Rational> a, std::vector<Rational> b,
                                                        bool require_unique = true,
                                                        bool* unique_out = nullptr) {
    const int m = a.rows, n = a.cols;
    std::vector<int> pivot_col_of_row;
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int pivot = -1;
        for (int r = row; r < m; ++r) {
            if (a(r, col) != 0) {
                pivot = r;
                break;
            }
        }
        if (pivot < 0) continue;
        if (pivot != row) {
            for (int j = col; j < n; ++j) std::swap(a(row, j), a(pivot, j));
            std::swap(b[row], b[pivot]);
        }
        const Rational inv = 1 / a(row, col);
        for (int r = 0; r < m; ++r) {
            if (r == row || a(r, col) == 0) continue;
            const Rational f = a(r, col) * inv;
            a(r, col) = 0;
            for (int j = col + 1; j < n; ++j) a(r, j) -= f * a(row, j);
            b[r] -= f * b[row];
        }
        pivot_col_of_row.push_back(col);
        ++row;
    }
    for (int r = row; r < m; ++r) {
        if (b[r] != 0) return std::nullopt;  // inconsistent
    }
    const bool unique = (row == n);
    if (unique_out) *unique_out = unique;
    if (!unique && require_unique) throw InternalError("solve_exact: underdetermined system");
    std::vector<Rational> x(n, Rational(0));
    for (int r = 0; r < row; ++r) {
        const int pc = pivot_col_of_row[r];
        Rational rhs = b[r];
        for (int j = pc + 1; j < n; ++j) {
            if (a(r, j) != 0) rhs -= a(r, j) * x[j];
        }
        x[pc] = rhs / a(r, pc);
    }
    // Back-substitution above assumed free variables are zero; with full
    // row-reduction the remaining coefficients on pivot columns are zero.
    return x;
}

}  // namespace countdist
