#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "countdist/counts.hpp"
#include "countdist/errors.hpp"
#include "countdist/lp.hpp"
#include "countdist/metrics.hpp"
#include "countdist/scales.hpp"
#include "countdist/types.hpp"

namespace countdist {

enum class SelectorKind { kMax, kMin, kSandwich };

inline std::string selector_name(SelectorKind k) {
    switch (k) {
        case SelectorKind::kMax: return "max";
        case SelectorKind::kMin: return "min";
        case SelectorKind::kSandwich: return "sandwich";
    }
    return "?";
}

/// Column selection for the greedy constructor. The sandwich selector walks
/// the prescribed order 0, n-1, 1, n-2, ... and skips exhausted columns; max
/// and min pick by z among columns with remaining capacity, breaking ties
/// toward the smaller index.
class ColumnSelector {
public:
    ColumnSelector(SelectorKind kind, int n) : kind_(kind) {
        if (kind_ == SelectorKind::kSandwich) {
            order_.reserve(static_cast<size_t>(n));
            int lo = 0, hi = n - 1;
            while (lo <= hi) {
                order_.push_back(lo++);
                if (lo <= hi) order_.push_back(hi--);
            }
        }
    }

    template <class T>
    int select(const std::vector<T>& capacity, const std::vector<T>& z) {
        const int n = static_cast<int>(capacity.size());
        if (kind_ == SelectorKind::kSandwich) {
            while (cursor_ < order_.size() && !(capacity[static_cast<size_t>(order_[cursor_])] > T(0)))
                ++cursor_;
            if (cursor_ >= order_.size())
                throw InternalError("column selector called with no remaining capacity");
            return order_[cursor_];
        }
        int best = -1;
        for (int j = 0; j < n; ++j) {
            if (!(capacity[static_cast<size_t>(j)] > T(0))) continue;
            if (best < 0) {
                best = j;
                continue;
            }
            if (kind_ == SelectorKind::kMax ? z[static_cast<size_t>(j)] > z[static_cast<size_t>(best)]
                                            : z[static_cast<size_t>(j)] < z[static_cast<size_t>(best)])
                best = j;
        }
        if (best < 0) throw InternalError("column selector called with no remaining capacity");
        return best;
    }

private:
    SelectorKind kind_;
    std::vector<int> order_;
    size_t cursor_ = 0;
};

/// Working state of the greedy constructor: partial mechanism A, row
/// remainder r = 1 - A1 and column remainder c = z - zA.
template <class T>
struct ConstructorState {
    Mat<T> a;
    std::vector<T> r;
    std::vector<T> c;
};

namespace detail {

template <class T>
struct StepSize {
    T q{};
    int binding_row = -1;         // adjacent pair whose privacy bound binds, if any
    bool capacity_bound = false;  // the c_j / (z s) cap binds (possibly tied with a row)
};

/// Largest gamma with gamma * zs <= c_j and r - gamma*s neighbor
/// indistinguishable, evaluated with the per-pair closed form
///   p_i = +1:  (lambda r_{i+1} - r_i) / (lambda s_{i+1} - s_i)
///   p_i = -1:  (r_i - lambda^{-1} r_{i+1}) / (s_i - lambda^{-1} s_{i+1}).
/// Ties between the capacity cap and a row bound are resolved toward the
/// capacity so the column closes; on the tie both constraints bind at once.
template <class T>
StepSize<T> compute_q_detail(const std::vector<T>& r, const T& c_j, const std::vector<T>& s,
                             const T& zs, const PatternT& pattern, const Privacy<T>& p) {
    StepSize<T> out;
    bool have_row = false;
    T row_q{};
    int row_idx = -1;
    for (size_t i = 0; i + 1 < r.size(); ++i) {
        T num, den;
        if (pattern[i] > 0) {
            num = p.lambda * r[i + 1] - r[i];
            den = p.lambda * s[i + 1] - s[i];
        } else {
            num = r[i] - p.lambda_inv * r[i + 1];
            den = s[i] - p.lambda_inv * s[i + 1];
        }
        if (!(den > T(0))) continue;  // no constraint from a flat/underflowed pair
        const T cand = num / den;
        if (!have_row || cand < row_q) {
            row_q = cand;
            row_idx = static_cast<int>(i);
            have_row = true;
        }
    }
    if (!(zs > T(0))) {
        if (!have_row) throw InternalError("compute_q: no binding constraint found");
        out.q = row_q;
        out.binding_row = row_idx;
        return out;
    }
    const T cap = c_j / zs;
    T tie_slack(0);
    if constexpr (std::is_same_v<T, double>)
        tie_slack = 1e-11 * (abs_val(cap) + (have_row ? abs_val(row_q) : T(0)));
    if (!have_row || cap <= row_q + tie_slack) {
        out.capacity_bound = true;
        if (have_row && row_q <= cap) {
            out.q = row_q;  // exact tie (or float-level tie): both constraints bind
            out.binding_row = row_idx;
        } else {
            out.q = cap;
        }
    } else {
        out.q = row_q;
        out.binding_row = row_idx;
    }
    return out;
}

/// Post-update bound bookkeeping. Pairs already bound are re-pinned to their
/// exact equality (the matched scale direction preserves the bound, so the
/// pin only removes rounding drift). The arg-min pair of the step and any
/// pair that reached its bound in a tie become newly bound: a scale moving in
/// direction d drives the ratio toward the bound that direction -d preserves.
template <class T>
void mark_new_bounds(std::vector<T>& r, const StepSize<T>& step, const PatternT& pat,
                     const Privacy<T>& p, std::vector<int8_t>& bound_dir) {
    T tie_tol(0);
    if constexpr (std::is_same_v<T, double>) tie_tol = 1e-12;
    for (size_t i = 0; i + 1 < r.size(); ++i) {
        if (bound_dir[i] != 0) {
            r[i + 1] = bound_dir[i] > 0 ? T(p.lambda * r[i]) : T(p.lambda_inv * r[i]);
            continue;
        }
        const int8_t dir = static_cast<int8_t>(-pat[i]);
        const T bound_val = dir > 0 ? T(p.lambda * r[i]) : T(p.lambda_inv * r[i]);
        const bool is_argmin = step.binding_row == static_cast<int>(i);
        const T gap = abs_val(T(r[i + 1] - bound_val));
        const bool tied = gap <= tie_tol * std::max(abs_val(r[i + 1]), abs_val(bound_val));
        if (is_argmin || tied) {
            bound_dir[i] = dir;
            r[i + 1] = bound_val;
        }
    }
}

}  // namespace detail

template <class T>
T compute_q(const std::vector<T>& r, const T& c_j, const std::vector<T>& s,
            const Distribution<T>& z, const PatternT& pattern, const Privacy<T>& p,
            const T tol = default_membership_tol<T>()) {
    if (!neighbor_indistinguishable(r, p, tol))
        throw InputError("compute_q: row remainder is not neighbor indistinguishable");
    T zs(0);
    for (size_t i = 0; i < s.size(); ++i) zs += z.p[i] * s[i];
    return detail::compute_q_detail(r, c_j, s, zs, pattern, p).q;
}

/// Step-6 pattern repair: wherever r's privacy bound already binds against the
/// proposed direction, flip the pattern so subtracting the scale preserves it.
template <class T>
PatternT adjust_pattern(const PatternT& pattern, const std::vector<T>& r, const Privacy<T>& p,
                        const T tol = T(std::is_same_v<T, double> ? 1e-9 : 0)) {
    PatternT out = pattern;
    for (size_t i = 0; i + 1 < r.size(); ++i) {
        // Flip condition: r_{i+1}/r_i = exp(-p_i eps), written multiplicatively.
        const T expected = out[i] > 0 ? T(p.lambda_inv * r[i]) : T(p.lambda * r[i]);
        const T gap = abs_val(T(r[i + 1] - expected));
        if (gap <= tol * std::max(abs_val(r[i + 1]), abs_val(expected)))
            out[i] = static_cast<int8_t>(-out[i]);
    }
    return out;
}

struct HeuristicStats {
    int inner_iterations = 0;
    int outer_iterations = 0;
};

/// Greedy fixed-point constructor. Fills one column at a time with conic
/// combinations of scales. Output is an extreme point of F[z] with at most
/// 2n-1 scale additions in total.
///
/// Instead of re-detecting binding privacy bounds numerically each pass, the
/// loop carries the bound set explicitly: a pair can only start binding at the
/// arg-min of the step-size computation (ties included), and once binding it
/// stays binding for the rest of the run. The float path additionally snaps
/// each newly bound pair to an exact equality and closes out sub-noise column
/// residues, which keeps the iteration count at the exact-arithmetic bound.
template <class T>
TransitionMatrix<T> heuristic_constructor(
    const Distribution<T>& z, const Privacy<T>& p, SelectorKind selector_kind,
    HeuristicStats* stats = nullptr,
    const std::function<void(const ConstructorState<T>&)>& observer = nullptr) {
    const int n = z.size();
    if (n < 1) throw InputError("heuristic_constructor: empty distribution");
    ConstructorState<T> st;
    st.a = Mat<T>(n, n);
    st.r.assign(static_cast<size_t>(n), T(1));
    st.c = z.p;
    ColumnSelector selector(selector_kind, n);
    std::vector<int8_t> bound_dir(n > 1 ? static_cast<size_t>(n - 1) : 0, 0);
    const int max_inner = 2 * n - 1;
    int inner = 0, outer = 0;

    auto has_capacity = [&]() {
        for (const auto& cj : st.c)
            if (cj > T(0)) return true;
        return false;
    };

    while (has_capacity()) {
        const int j = selector.select(st.c, z.p);
        ++outer;
        while (st.c[static_cast<size_t>(j)] > T(0)) {
            if (inner >= max_inner)
                throw InternalError("heuristic_constructor: inner-loop bound 2n-1 exceeded");
            PatternT pat = single_peaked_pattern(j, n);
            for (int i = 0; i + 1 < n; ++i) {
                if (bound_dir[static_cast<size_t>(i)] != 0)
                    pat[static_cast<size_t>(i)] = bound_dir[static_cast<size_t>(i)];
            }
            const std::vector<T> s = scale_from_pattern(pat, p);
            T zs(0);
            for (int i = 0; i < n; ++i) zs += z.p[static_cast<size_t>(i)] * s[static_cast<size_t>(i)];
            const auto step =
                detail::compute_q_detail(st.r, st.c[static_cast<size_t>(j)], s, zs, pat, p);
            if (!(step.q > T(0)))
                throw InternalError(
                    "heuristic_constructor: stalled with a non-positive step after pattern "
                    "adjustment");
            for (int i = 0; i < n; ++i) {
                st.a(i, j) += step.q * s[static_cast<size_t>(i)];
                st.r[static_cast<size_t>(i)] -= step.q * s[static_cast<size_t>(i)];
                if (st.r[static_cast<size_t>(i)] < T(0)) st.r[static_cast<size_t>(i)] = T(0);
            }
            if (step.capacity_bound) {
                st.c[static_cast<size_t>(j)] = T(0);  // column filled exactly
            } else {
                const T before = st.c[static_cast<size_t>(j)];
                st.c[static_cast<size_t>(j)] -= step.q * zs;
                if constexpr (std::is_same_v<T, double>) {
                    // Residues below float noise close the column. The total
                    // capacity starts at 1, so the absolute floor covers the
                    // phantom capacity left by c and r drifting apart.
                    if (st.c[static_cast<size_t>(j)] <= std::max(1e-11 * before, 1e-14))
                        st.c[static_cast<size_t>(j)] = 0.0;
                }
            }
            detail::mark_new_bounds(st.r, step, pat, p, bound_dir);
            ++inner;
            if (observer) observer(st);
        }
    }
    if (stats) {
        stats->inner_iterations = inner;
        stats->outer_iterations = outer;
    }
    return st.a;
}

/// Count-error-minimizing fixed-point constructor: a dense LP over F[z] with
/// t >= 0, row sums, fixed-point equalities (one dropped as redundant) and the
/// two privacy inequalities per adjacent pair. Columns with z_j = 0 are forced
/// to zero up front.
template <class T>
TransitionMatrix<T> lp_fixed_point_constructor(const Distribution<T>& z, const Privacy<T>& p,
                                               const Mat<T>& w, int capacity_guard = 64) {
    const int n = z.size();
    if (n < 1) throw InputError("lp_fixed_point_constructor: empty distribution");
    if (w.rows != n || w.cols != n) throw InputError("lp_fixed_point_constructor: weight shape");
    if (n > capacity_guard)
        throw CapacityError(
            "lp_fixed_point_constructor: n exceeds the dense-LP guard; use the heuristic "
            "constructor");

    std::vector<int> active;  // columns with z_j > 0
    for (int j = 0; j < n; ++j)
        if (z.p[static_cast<size_t>(j)] > T(0)) active.push_back(j);
    if (active.empty()) throw InputError("lp_fixed_point_constructor: z has no mass");
    const int na = static_cast<int>(active.size());

    auto var = [&](int i, int jj) { return i * na + jj; };
    LpProblem<T> lp;
    lp.num_vars = n * na;
    lp.objective.assign(static_cast<size_t>(lp.num_vars), T(0));
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < na; ++jj) lp.objective[static_cast<size_t>(var(i, jj))] = w(i, active[static_cast<size_t>(jj)]);

    for (int i = 0; i < n; ++i) {  // row sums
        LpConstraint<T> row;
        row.rel = LpRel::kEq;
        row.rhs = T(1);
        for (int jj = 0; jj < na; ++jj) row.terms.push_back({var(i, jj), T(1)});
        lp.rows.push_back(std::move(row));
    }
    for (int jj = 0; jj + 1 < na; ++jj) {  // fixed point, last column redundant
        LpConstraint<T> row;
        row.rel = LpRel::kEq;
        row.rhs = z.p[static_cast<size_t>(active[static_cast<size_t>(jj)])];
        for (int i = 0; i < n; ++i) row.terms.push_back({var(i, jj), z.p[static_cast<size_t>(i)]});
        lp.rows.push_back(std::move(row));
    }
    for (int jj = 0; jj < na; ++jj) {
        for (int i = 0; i + 1 < n; ++i) {
            LpConstraint<T> up;  // t_{ij} <= lambda t_{i+1,j}
            up.rel = LpRel::kLe;
            up.rhs = T(0);
            up.terms = {{var(i, jj), T(1)}, {var(i + 1, jj), T(-p.lambda)}};
            lp.rows.push_back(std::move(up));
            LpConstraint<T> lo;  // lambda^{-1} t_{i+1,j} <= t_{ij}
            lo.rel = LpRel::kLe;
            lo.rhs = T(0);
            lo.terms = {{var(i, jj), T(-1)}, {var(i + 1, jj), p.lambda_inv}};
            lp.rows.push_back(std::move(lo));
        }
    }

    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::kOptimal)
        throw InternalError("lp_fixed_point_constructor: LP over the nonempty polytope F failed");
    Mat<T> t(n, n);
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < na; ++jj) t(i, active[static_cast<size_t>(jj)]) = sol.x[static_cast<size_t>(var(i, jj))];
    return t;
}

/// Count-error minimizer over the unfixed polytope U (no fixed point), used as
/// the independent optimality oracle for the scale-placing constructor.
template <class T>
TransitionMatrix<T> lp_unfixed_minimizer(const Privacy<T>& p, const Mat<T>& w,
                                         int capacity_guard = 64) {
    const int n = w.rows;
    if (w.cols != n) throw InputError("lp_unfixed_minimizer: weight shape");
    if (n > capacity_guard) throw CapacityError("lp_unfixed_minimizer: n exceeds the dense-LP guard");
    auto var = [&](int i, int j) { return i * n + j; };
    LpProblem<T> lp;
    lp.num_vars = n * n;
    lp.objective = w.a;
    for (int i = 0; i < n; ++i) {
        LpConstraint<T> row;
        row.rel = LpRel::kEq;
        row.rhs = T(1);
        for (int j = 0; j < n; ++j) row.terms.push_back({var(i, j), T(1)});
        lp.rows.push_back(std::move(row));
    }
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            LpConstraint<T> up;
            up.rel = LpRel::kLe;
            up.rhs = T(0);
            up.terms = {{var(i, j), T(1)}, {var(i + 1, j), T(-p.lambda)}};
            lp.rows.push_back(std::move(up));
            LpConstraint<T> lo;
            lo.rel = LpRel::kLe;
            lo.rhs = T(0);
            lo.terms = {{var(i, j), T(-1)}, {var(i + 1, j), p.lambda_inv}};
            lp.rows.push_back(std::move(lo));
        }
    }
    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::kOptimal)
        throw InternalError("lp_unfixed_minimizer: LP over the nonempty polytope U failed");
    Mat<T> t(n, n);
    t.a = sol.x;
    return t;
}

/// Placement trace of the unfixed-optimum constructor, for tests.
struct UnfixedPlacement {
    std::vector<int> column_of_scale;  // col(l), non-decreasing in l
};

/// Places each single-peaked scale (weighted by the row weights) into the
/// rightmost column minimizing its contribution, scanning left to right.
/// Requires a row-wise concentrating and row-wise convex weight matrix.
template <class T>
TransitionMatrix<T> unfixed_optimum_constructor(const Privacy<T>& p, const Mat<T>& w, int n,
                                                UnfixedPlacement* placement = nullptr) {
    if (n < 1) throw InputError("unfixed_optimum_constructor: n must be >= 1");
    if (w.rows != n || w.cols != n) throw InputError("unfixed_optimum_constructor: weight shape");
    if (!validate_row_wise_concentrating(w))
        throw InputError("unfixed_optimum_constructor: weight matrix is not row-wise concentrating");
    if (!validate_row_wise_convex(w))
        throw InputError("unfixed_optimum_constructor: weight matrix is not row-wise convex");

    const Mat<T> sigma = single_peaked_matrix(n, p);
    const std::vector<T> omega = solve_row_weights(n, p);
    auto scale_cost = [&](int col, int l) {
        T dot(0);
        for (int i = 0; i < n; ++i) dot += w(i, col) * sigma(i, l);
        return T(omega[static_cast<size_t>(l)] * dot);
    };

    Mat<T> a(n, n);
    if (placement) placement->column_of_scale.assign(static_cast<size_t>(n), -1);
    int j = 0;
    for (int l = 0; l <= n - 1;) {
        const T current_error = scale_cost(j, l);
        const bool place = (j == n - 1) || scale_cost(j + 1, l) > current_error;
        if (place) {
            for (int i = 0; i < n; ++i) a(i, j) += omega[static_cast<size_t>(l)] * sigma(i, l);
            if (placement) placement->column_of_scale[static_cast<size_t>(l)] = j;
            ++l;
        } else {
            ++j;
        }
    }
    return a;
}

}  // namespace countdist
