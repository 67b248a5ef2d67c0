#include <doctest.h>

#include <cmath>

#include "countdist/constructors.hpp"
#include "countdist/baselines.hpp"
#include "test_helpers.hpp"

using namespace countdist;
using namespace countdist::testing;

TEST_SUITE_BEGIN("constructors");

namespace {

const Privacy<Rational> kLn2 = Privacy<Rational>::from_lambda(Rational(2));

Distribution<Rational> random_rational_distribution(Rng& rng, int n, bool allow_zero) {
    std::vector<long> weights(static_cast<size_t>(n));
    long total = 0;
    for (auto& w : weights) {
        w = static_cast<long>(rng.next_u64() % 9) + (allow_zero ? 0 : 1);
        total += w;
    }
    if (total == 0) {
        weights[0] = 1;
        total = 1;
    }
    Distribution<Rational> z;
    for (long w : weights) z.p.push_back(q(w, total));
    return z;
}

}  // namespace

TEST_CASE("compute_q worked example") {
    const auto z = uniform_q(3);
    const std::vector<Rational> r{q(1), q(1), q(1)};
    const auto s = scale_from_pattern<Rational>({-1, -1}, kLn2);
    CHECK(compute_q<Rational>(r, q(1, 3), s, z, {-1, -1}, kLn2) == q(1));
    CHECK(compute_q<Rational>(r, q(10), s, z, {-1, -1}, kLn2) == q(7, 6));

    // Proportional remainder: r = m s exhausts at exactly m.
    const Rational m(5, 3);
    std::vector<Rational> rp(3);
    for (int i = 0; i < 3; ++i) rp[static_cast<size_t>(i)] = m * s[static_cast<size_t>(i)];
    Rational zs(0);
    for (int i = 0; i < 3; ++i) zs += z.p[static_cast<size_t>(i)] * s[static_cast<size_t>(i)];
    CHECK(compute_q<Rational>(rp, Rational(m * zs + 1), s, z, {-1, -1}, kLn2) == m);

    CHECK_THROWS_AS(compute_q<Rational>({q(1), q(0), q(1)}, q(1), s, z, {-1, -1}, kLn2),
                    InputError);
}

TEST_CASE("adjust_pattern flips exactly the binding rows") {
    const std::vector<Rational> ones{q(1), q(1), q(1)};
    CHECK(adjust_pattern<Rational>({-1, -1}, ones, kLn2) == PatternT{-1, -1});

    const std::vector<Rational> doubling{q(1), q(2), q(4)};
    CHECK(adjust_pattern<Rational>({-1, -1}, doubling, kLn2) == PatternT{1, 1});

    const std::vector<Rational> equal{q(3, 7), q(3, 7), q(3, 7), q(3, 7)};
    for (const auto& pat : {PatternT{1, 1, -1}, PatternT{-1, 1, -1}, PatternT{1, -1, 1}})
        CHECK(adjust_pattern<Rational>(pat, equal, kLn2) == pat);
}

TEST_CASE("column selectors") {
    ColumnSelector sandwich(SelectorKind::kSandwich, 4);
    std::vector<Rational> c{q(1), q(1), q(1), q(1)};
    const std::vector<Rational> z{q(1, 4), q(1, 4), q(1, 4), q(1, 4)};
    std::vector<int> visits;
    for (int step = 0; step < 4; ++step) {
        const int j = sandwich.select(c, z);
        visits.push_back(j);
        c[static_cast<size_t>(j)] = 0;
    }
    CHECK(visits == std::vector<int>{0, 3, 1, 2});

    ColumnSelector max_sel(SelectorKind::kMax, 3);
    const std::vector<Rational> zmax{q(1, 5), q(1, 2), q(3, 10)};
    std::vector<Rational> cmax = zmax;
    CHECK(max_sel.select(cmax, zmax) == 1);

    ColumnSelector min_sel(SelectorKind::kMin, 3);
    const std::vector<Rational> zmin{q(0), q(1, 10), q(2, 10)};
    std::vector<Rational> cmin = zmin;
    CHECK(min_sel.select(cmin, zmin) == 1);

    std::vector<Rational> empty_cap{q(0), q(0), q(0)};
    CHECK_THROWS_AS(min_sel.select(empty_cap, zmin), InternalError);
}

TEST_CASE("ties break toward the smaller index for max and min") {
    ColumnSelector max_sel(SelectorKind::kMax, 4);
    const std::vector<Rational> z{q(1, 4), q(1, 4), q(1, 4), q(1, 4)};
    std::vector<Rational> c = z;
    CHECK(max_sel.select(c, z) == 0);
    ColumnSelector min_sel(SelectorKind::kMin, 4);
    CHECK(min_sel.select(c, z) == 0);
}

TEST_CASE("heuristic first fill with the max selector on uniform z") {
    const auto z = uniform_q(3);
    bool first = true;
    const auto observer = [&](const ConstructorState<Rational>& st) {
        if (!first) return;
        first = false;
        CHECK(st.a(0, 0) == q(4, 7));
        CHECK(st.a(1, 0) == q(2, 7));
        CHECK(st.a(2, 0) == q(1, 7));
        CHECK(st.c[0] == 0);
    };
    heuristic_constructor<Rational>(z, kLn2, SelectorKind::kMax, nullptr, observer);
}

TEST_CASE("heuristic output is an exact extreme point of F") {
    const auto z = uniform_q(3);
    for (auto sel : {SelectorKind::kMax, SelectorKind::kMin, SelectorKind::kSandwich}) {
        HeuristicStats stats;
        const auto t = heuristic_constructor<Rational>(z, kLn2, sel, &stats);
        CHECK(in_F(t, z, kLn2, Rational(0)));
        CHECK(is_extreme_in_F(t, z, kLn2, Rational(0)));
        CHECK(stats.inner_iterations <= 5);
    }
    CHECK(heuristic_constructor<Rational>(dist<Rational>({q(1)}), kLn2, SelectorKind::kSandwich) ==
          Mat<Rational>::identity(1));
}

TEST_CASE("heuristic maintains the state invariants at every step") {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 5);
        const auto z = random_rational_distribution(rng, n, false);
        const auto observer = [&](const ConstructorState<Rational>& st) {
            Rational z_dot_r(0);
            for (int i = 0; i < n; ++i) {
                Rational row_sum(0);
                for (int j = 0; j < n; ++j) row_sum += st.a(i, j);
                CHECK(row_sum + st.r[static_cast<size_t>(i)] == 1);
                z_dot_r += z.p[static_cast<size_t>(i)] * st.r[static_cast<size_t>(i)];
            }
            const auto za = vecmat(z.p, st.a);
            Rational c_total(0);
            for (int j = 0; j < n; ++j) {
                CHECK(za[static_cast<size_t>(j)] + st.c[static_cast<size_t>(j)] ==
                      z.p[static_cast<size_t>(j)]);
                CHECK(st.c[static_cast<size_t>(j)] >= 0);
                c_total += st.c[static_cast<size_t>(j)];
            }
            CHECK(c_total == z_dot_r);
            CHECK(neighbor_indistinguishable(st.r, kLn2, Rational(0)));
        };
        heuristic_constructor<Rational>(z, kLn2, SelectorKind::kSandwich, nullptr, observer);
    }
}

TEST_CASE("heuristic soundness on random rational instances") {
    // Downsized version of the acceptance sweep; includes zero entries.
    Rng rng(31);
    const std::vector<Rational> lambdas{q(3, 2), q(2), q(3)};
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 6);
        const auto priv = Privacy<Rational>::from_lambda(lambdas[trial % lambdas.size()]);
        const auto z = random_rational_distribution(rng, n, trial % 2 == 0);
        for (auto sel : {SelectorKind::kMax, SelectorKind::kMin, SelectorKind::kSandwich}) {
            HeuristicStats stats;
            const auto t = heuristic_constructor<Rational>(z, priv, sel, &stats);
            CHECK(in_F(t, z, priv, Rational(0)));
            CHECK(is_extreme_in_F(t, z, priv, Rational(0)));
            CHECK(stats.inner_iterations <= 2 * n - 1);
            for (int j = 0; j < n; ++j) {
                if (z.p[static_cast<size_t>(j)] == 0) {
                    for (int i = 0; i < n; ++i) CHECK(t(i, j) == 0);
                }
            }
        }
    }
}

TEST_CASE("heuristic float mode stays within membership tolerance") {
    const auto priv = Privacy<double>::from_epsilon(0.37);
    for (int n : {4, 16, 64, 200}) {
        Distribution<double> z;
        z.p.resize(static_cast<size_t>(n));
        Rng rng(static_cast<uint64_t>(n));
        double total = 0.0;
        for (auto& v : z.p) {
            v = rng.uniform01();
            total += v;
        }
        for (auto& v : z.p) v /= total;
        HeuristicStats stats;
        const auto t = heuristic_constructor(z, priv, SelectorKind::kSandwich, &stats);
        CHECK(in_F(t, z, priv));
        CHECK(stats.inner_iterations <= 2 * n - 1);
    }
}

TEST_CASE("unfixed optimum reproduces the truncated geometric on uniform z") {
    const auto z = uniform_q(3);
    const auto w = build_weight_matrix(ErrorKind::kEad, z);
    UnfixedPlacement placement;
    const auto t = unfixed_optimum_constructor<Rational>(kLn2, w, 3, &placement);
    CHECK(t == mat<Rational>({{q(2, 3), q(1, 6), q(1, 6)},
                              {q(1, 3), q(1, 3), q(1, 3)},
                              {q(1, 6), q(1, 6), q(2, 3)}}));
    CHECK(t == truncated_geometric_matrix(kLn2, 3));
    CHECK(placement.column_of_scale == std::vector<int>{0, 1, 2});
    CHECK(is_extreme_in_U(t, kLn2, Rational(0)));

    CHECK(unfixed_optimum_constructor<Rational>(kLn2, build_weight_matrix(ErrorKind::kEad, uniform_q(1)), 1) ==
          Mat<Rational>::identity(1));
}

TEST_CASE("unfixed optimum placements are monotone") {
    Rng rng(47);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + static_cast<int>(rng.next_u64() % 6);
        const auto z = random_rational_distribution(rng, n, true);
        const auto w = build_weight_matrix(trial % 2 ? ErrorKind::kEad : ErrorKind::kMse, z);
        UnfixedPlacement placement;
        const auto t = unfixed_optimum_constructor<Rational>(kLn2, w, n, &placement);
        CHECK(in_U(t, kLn2, Rational(0)));
        for (size_t l = 0; l + 1 < placement.column_of_scale.size(); ++l)
            CHECK(placement.column_of_scale[l] <= placement.column_of_scale[l + 1]);
    }
}

TEST_CASE("unfixed optimum validates its weight matrix") {
    const auto bad_concentrating =
        mat<Rational>({{q(0), q(2), q(1)}, {q(1), q(0), q(1)}, {q(1), q(2), q(0)}});
    CHECK_THROWS_WITH_AS(unfixed_optimum_constructor<Rational>(kLn2, bad_concentrating, 3),
                         doctest::Contains("concentrating"), InputError);

    const auto bad_convex =
        mat<Rational>({{q(0), q(3), q(4)}, {q(1), q(0), q(1)}, {q(4), q(3), q(0)}});
    CHECK_THROWS_WITH_AS(unfixed_optimum_constructor<Rational>(kLn2, bad_convex, 3),
                         doctest::Contains("convex"), InputError);
}

TEST_SUITE_END();
