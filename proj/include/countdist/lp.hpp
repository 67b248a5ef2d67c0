#pragma once

#include <cstdint>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

#include "countdist/errors.hpp"
#include "countdist/linalg.hpp"

namespace countdist {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };
enum class LpRel { kLe, kEq };

template <class T>
struct LpConstraint {
    std::vector<std::pair<int, T>> terms;  // (variable index, coefficient)
    LpRel rel = LpRel::kLe;
    T rhs = T(0);
};

/// minimize c^T x  subject to the rows, x >= 0.
template <class T>
struct LpProblem {
    int num_vars = 0;
    std::vector<T> objective;
    std::vector<LpConstraint<T>> rows;
};

template <class T>
struct LpSolution {
    LpStatus status = LpStatus::kInfeasible;
    std::vector<T> x;
    T objective = T(0);
};

/// Two-phase primal simplex on a dense tableau. Rational instantiations pivot
/// exactly with Bland's rule throughout (the oracle configuration); double
/// instantiations use Dantzig pricing and fall back to Bland once degenerate
/// pivots pile up, which keeps the anti-cycling guarantee.
template <class T>
class SimplexSolver {
public:
    explicit SimplexSolver(const LpProblem<T>& prob) : prob_(prob) {}

    LpSolution<T> solve() {
        build_tableau();
        // Phase 1: minimize the sum of artificials.
        if (num_artificial_ > 0) {
            load_costs(phase1_costs());
            run();
            if (objective_value() > feas_tol()) return {LpStatus::kInfeasible, {}, T(0)};
        }
        // Phase 2: original objective, artificial columns barred from entering.
        // Basic artificials (at level zero) are pivoted out first so they can
        // never regain a positive value; rows with no real coefficient left
        // are redundant and stay inert.
        for (int j = first_artificial_; j < total_cols_; ++j) allowed_[j] = false;
        for (int i = 0; i < m_; ++i) {
            if (basis_[static_cast<size_t>(i)] < first_artificial_) continue;
            for (int j = 0; j < first_artificial_; ++j) {
                const T& a = tab_[static_cast<size_t>(i) * width_ + j];
                if (a > pivot_tol() || a < -pivot_tol()) {
                    pivot(i, j);
                    break;
                }
            }
        }
        load_costs(phase2_costs());
        const bool bounded = run();
        if (!bounded) return {LpStatus::kUnbounded, {}, T(0)};
        LpSolution<T> sol;
        sol.status = LpStatus::kOptimal;
        sol.x.assign(static_cast<size_t>(prob_.num_vars), T(0));
        for (int i = 0; i < m_; ++i) {
            if (basis_[i] < prob_.num_vars) sol.x[static_cast<size_t>(basis_[i])] = rhs(i);
        }
        sol.objective = T(0);
        for (int v = 0; v < prob_.num_vars; ++v) sol.objective += prob_.objective[v] * sol.x[v];
        return sol;
    }

private:
    static constexpr bool is_exact = !std::is_same_v<T, double>;

    T feas_tol() const {
        if constexpr (is_exact) return T(0);
        else return T(1e-7);
    }
    T pivot_tol() const {
        if constexpr (is_exact) return T(0);
        else return T(1e-9);
    }

    void build_tableau() {
        m_ = static_cast<int>(prob_.rows.size());
        int num_slack = 0;
        num_artificial_ = 0;
        for (const auto& row : prob_.rows) {
            if (row.rel == LpRel::kLe) ++num_slack;
            // Equalities and flipped <=-rows (negative rhs) need an artificial.
            if (row.rel == LpRel::kEq || row.rhs < T(0)) ++num_artificial_;
        }
        first_slack_ = prob_.num_vars;
        first_artificial_ = prob_.num_vars + num_slack;
        total_cols_ = first_artificial_ + num_artificial_;
        width_ = total_cols_ + 1;  // + rhs
        tab_.assign(static_cast<size_t>(m_) * width_, T(0));
        basis_.assign(static_cast<size_t>(m_), -1);
        allowed_.assign(static_cast<size_t>(total_cols_), true);

        int slack_cursor = first_slack_;
        int art_cursor = first_artificial_;
        for (int i = 0; i < m_; ++i) {
            const auto& row = prob_.rows[static_cast<size_t>(i)];
            const bool flip = row.rhs < T(0);
            for (const auto& [var, coef] : row.terms) {
                if (var < 0 || var >= prob_.num_vars) throw InputError("solve_lp: bad variable index");
                at(i, var) += flip ? T(-coef) : coef;
            }
            set_rhs(i, flip ? T(-row.rhs) : row.rhs);
            if (row.rel == LpRel::kLe) {
                at(i, slack_cursor) = flip ? T(-1) : T(1);
                if (!flip) basis_[static_cast<size_t>(i)] = slack_cursor;
                ++slack_cursor;
            }
            if (basis_[static_cast<size_t>(i)] < 0) {
                at(i, art_cursor) = T(1);
                basis_[static_cast<size_t>(i)] = art_cursor;
                ++art_cursor;
            }
        }
    }

    std::vector<T> phase1_costs() const {
        std::vector<T> c(static_cast<size_t>(total_cols_), T(0));
        for (int j = first_artificial_; j < total_cols_; ++j) c[static_cast<size_t>(j)] = T(1);
        return c;
    }

    std::vector<T> phase2_costs() const {
        std::vector<T> c(static_cast<size_t>(total_cols_), T(0));
        for (int v = 0; v < prob_.num_vars; ++v) c[static_cast<size_t>(v)] = prob_.objective[v];
        return c;
    }

    /// Rebuilds the reduced-cost row r = c - c_B B^{-1} A for the given costs.
    void load_costs(const std::vector<T>& costs) {
        costs_ = costs;
        reduced_.assign(static_cast<size_t>(width_), T(0));
        for (int j = 0; j < total_cols_; ++j) reduced_[static_cast<size_t>(j)] = costs_[static_cast<size_t>(j)];
        reduced_[static_cast<size_t>(total_cols_)] = T(0);
        for (int i = 0; i < m_; ++i) {
            const T cb = costs_[static_cast<size_t>(basis_[static_cast<size_t>(i)])];
            if (cb == T(0)) continue;
            for (int j = 0; j <= total_cols_; ++j)
                reduced_[static_cast<size_t>(j)] -= cb * tab_[static_cast<size_t>(i) * width_ + j];
        }
    }

    T objective_value() const { return T(-reduced_[static_cast<size_t>(total_cols_)]); }

    /// Returns false when the LP is unbounded in the current phase.
    bool run() {
        const int64_t bland_after = 50LL * (m_ + total_cols_);
        const int64_t hard_cap = is_exact ? 2'000'000LL : 5'000'000LL;
        int64_t iters = 0;
        bool bland = is_exact;
        for (;;) {
            if (++iters > hard_cap) throw InternalError("solve_lp: iteration cap exceeded");
            if (!bland && iters > bland_after) bland = true;
            const int enter = pick_entering(bland);
            if (enter < 0) return true;  // optimal for this phase
            const int leave = pick_leaving(enter);
            if (leave < 0) return false;  // unbounded
            pivot(leave, enter);
        }
    }

    int pick_entering(bool bland) const {
        int best = -1;
        T best_val = T(-pivot_tol());
        for (int j = 0; j < total_cols_; ++j) {
            if (!allowed_[static_cast<size_t>(j)]) continue;
            const T& r = reduced_[static_cast<size_t>(j)];
            if (r < best_val) {
                if (bland) return j;  // smallest index with negative reduced cost
                best_val = r;
                best = j;
            }
        }
        return best;
    }

    int pick_leaving(int enter) const {
        int best = -1;
        T best_ratio = T(0);
        for (int i = 0; i < m_; ++i) {
            const T& a = tab_[static_cast<size_t>(i) * width_ + enter];
            if (a <= pivot_tol()) continue;
            const T ratio = rhs(i) / a;
            if (best < 0 || ratio < best_ratio ||
                (ratio == best_ratio && basis_[static_cast<size_t>(i)] < basis_[static_cast<size_t>(best)])) {
                best = i;
                best_ratio = ratio;
            }
        }
        return best;
    }

    void pivot(int row, int col) {
        T* prow = &tab_[static_cast<size_t>(row) * width_];
        const T inv = T(1) / prow[col];
        for (int j = 0; j <= total_cols_; ++j) prow[j] *= inv;
        prow[col] = T(1);
        for (int i = 0; i < m_; ++i) {
            if (i == row) continue;
            T* r = &tab_[static_cast<size_t>(i) * width_];
            const T f = r[col];
            if (f == T(0)) continue;
            for (int j = 0; j <= total_cols_; ++j) r[j] -= f * prow[j];
            r[col] = T(0);
        }
        const T f = reduced_[static_cast<size_t>(col)];
        if (f != T(0)) {
            for (int j = 0; j <= total_cols_; ++j) reduced_[static_cast<size_t>(j)] -= f * prow[j];
            reduced_[static_cast<size_t>(col)] = T(0);
        }
        basis_[static_cast<size_t>(row)] = col;
    }

    T& at(int i, int j) { return tab_[static_cast<size_t>(i) * width_ + j]; }
    T rhs(int i) const { return tab_[static_cast<size_t>(i) * width_ + total_cols_]; }
    void set_rhs(int i, T v) { tab_[static_cast<size_t>(i) * width_ + total_cols_] = v; }

    const LpProblem<T>& prob_;
    std::vector<T> tab_, reduced_, costs_;
    std::vector<int> basis_;
    std::vector<bool> allowed_;
    int m_ = 0, first_slack_ = 0, first_artificial_ = 0, total_cols_ = 0, width_ = 0;
    int num_artificial_ = 0;
};

template <class T>
LpSolution<T> solve_lp(const LpProblem<T>& prob) {
    if (static_cast<int>(prob.objective.size()) != prob.num_vars)
        throw InputError("solve_lp: objective length must match num_vars");
    SimplexSolver<T> solver(prob);
    return solver.solve();
}

}  // namespace countdist
