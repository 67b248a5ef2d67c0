#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "countdist/errors.hpp"
#include "countdist/linalg.hpp"
#include "countdist/rational.hpp"

namespace countdist {

/// Privacy level carried as lambda = e^epsilon so exact-rational runs can pin
/// lambda to a rational (e.g. 2 for epsilon = ln 2) with no transcendental in
/// sight. lambda is the authoritative field; epsilon is kept for reporting.
template <class T>
struct Privacy {
    double epsilon = 0.0;
    T lambda = T(0);
    T lambda_inv = T(0);

    static Privacy from_lambda(T lam) {
        if (!(lam > T(1))) throw InputError("privacy parameter requires lambda > 1");
        Privacy p;
        p.lambda = lam;
        p.lambda_inv = T(1) / lam;
        p.epsilon = std::log(to_double(lam));
        return p;
    }

    static Privacy from_epsilon(double eps) {
        if (!(eps > 0.0)) throw InputError("privacy parameter requires epsilon > 0");
        if constexpr (std::is_same_v<T, double>) {
            Privacy p;
            p.epsilon = eps;
            p.lambda = std::exp(eps);
            p.lambda_inv = std::exp(-eps);
            return p;
        } else {
            // Exact mode fixes lambda to the dyadic rational nearest exp(eps).
            Privacy p = from_lambda(rational_from_double(std::exp(eps)));
            p.epsilon = eps;
            return p;
        }
    }
};

/// Per-category counts, already top-coded into {0,...,n-1}.
struct CountTable {
    std::vector<std::string> categories;
    std::vector<int64_t> counts;
    int n = 0;

    int64_t size() const { return static_cast<int64_t>(counts.size()); }
};

/// Saturating top-code at n-1, applied at ingestion.
inline CountTable make_count_table(std::vector<std::string> categories, std::vector<int64_t> counts,
                                   int n) {
    if (n < 1) throw InputError("count table requires n >= 1");
    if (counts.empty()) throw InputError("count table must have at least one category");
    if (categories.size() != counts.size())
        throw InputError("count table: categories and counts differ in length");
    for (auto& c : counts) {
        if (c < 0) throw InputError("count table: negative count");
        if (c > n - 1) c = n - 1;
    }
    CountTable t;
    t.categories = std::move(categories);
    t.counts = std::move(counts);
    t.n = n;
    return t;
}

struct Histogram {
    std::vector<int64_t> bins;
};

template <class T>
struct Distribution {
    std::vector<T> p;

    int size() const { return static_cast<int>(p.size()); }

    static Distribution uniform(int n) {
        Distribution d;
        d.p.assign(n, T(1) / T(n));
        return d;
    }
};

/// Row-stochastic count mechanism; t(i, j) = P(output j | input i).
template <class T>
using TransitionMatrix = Mat<T>;

using PatternT = std::vector<int8_t>;  // entries in {-1, +1}, length n-1

}  // namespace countdist
