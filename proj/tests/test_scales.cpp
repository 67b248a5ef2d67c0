#include <doctest.h>

#include "countdist/counts.hpp"
#include "countdist/scales.hpp"
#include "test_helpers.hpp"

using namespace countdist;
using namespace countdist::testing;

TEST_SUITE_BEGIN("scales");

namespace {

const Privacy<Rational> kLn2 = Privacy<Rational>::from_lambda(Rational(2));

}  // namespace

TEST_CASE("scale construction from patterns") {
    CHECK(scale_from_pattern<Rational>({-1, -1}, kLn2) ==
          std::vector<Rational>{q(4, 7), q(2, 7), q(1, 7)});
    CHECK(scale_from_pattern<Rational>({1, -1}, kLn2) ==
          std::vector<Rational>{q(1, 4), q(1, 2), q(1, 4)});
    CHECK(scale_from_pattern<Rational>({1, 1}, kLn2) ==
          std::vector<Rational>{q(1, 7), q(2, 7), q(4, 7)});
}

TEST_CASE("scale invariant: adjacent ratio is exactly lambda^{pattern}") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        PatternT pat(6);
        for (auto& p : pat) p = rng.bernoulli(0.5) ? 1 : -1;
        const auto s = scale_from_pattern<Rational>(pat, kLn2);
        Rational sum(0);
        for (const auto& v : s) {
            CHECK(v > 0);
            sum += v;
        }
        CHECK(sum == 1);
        for (size_t i = 0; i + 1 < s.size(); ++i)
            CHECK(s[i + 1] == (pat[i] > 0 ? Rational(s[i] * 2) : Rational(s[i] / 2)));
    }
}

TEST_CASE("canonical enumeration reproduces the worked scale matrix") {
    const auto psi = enumerate_scales<Rational>(3, kLn2);
    CHECK(psi == example_psi());
    CHECK(enumerate_scales<Rational>(1, kLn2).cols == 1);
    CHECK(enumerate_scales<Rational>(1, kLn2)(0, 0) == 1);
    CHECK(enumerate_scales<double>(11, Privacy<double>::from_epsilon(1.0)).cols == 1024);
    CHECK_THROWS_AS(enumerate_scales<Rational>(21, kLn2), CapacityError);
}

TEST_CASE("enumerated scales are distinct and pass the privacy predicate exactly") {
    const auto psi = enumerate_scales<Rational>(4, kLn2);
    for (int j = 0; j < psi.cols; ++j) {
        std::vector<Rational> col(4);
        for (int i = 0; i < 4; ++i) col[static_cast<size_t>(i)] = psi(i, j);
        CHECK(neighbor_indistinguishable(col, kLn2, Rational(0)));
        for (int j2 = j + 1; j2 < psi.cols; ++j2) {
            bool same = true;
            for (int i = 0; i < 4; ++i)
                if (psi(i, j) != psi(i, j2)) same = false;
            CHECK_FALSE(same);
        }
    }
}

TEST_CASE("conic combinations stay neighbor indistinguishable") {
    const auto psi = enumerate_scales<Rational>(4, kLn2);
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Rational> v(4, Rational(0));
        for (int j = 0; j < psi.cols; ++j) {
            const Rational coef = q(static_cast<long>(rng.next_u64() % 7), 5);
            for (int i = 0; i < 4; ++i) v[static_cast<size_t>(i)] += coef * psi(i, j);
        }
        CHECK(neighbor_indistinguishable(v, kLn2, Rational(0)));
    }
}

TEST_CASE("single-peaked patterns") {
    CHECK(single_peaked_pattern(0, 3) == PatternT{-1, -1});
    CHECK(single_peaked_pattern(1, 3) == PatternT{1, -1});
    CHECK(single_peaked_pattern(4, 5) == PatternT{1, 1, 1, 1});
    CHECK_THROWS_AS(single_peaked_pattern(3, 3), InputError);
    CHECK_THROWS_AS(single_peaked_pattern(-1, 3), InputError);
}

TEST_CASE("row weights reconstruct the all-ones vector exactly") {
    CHECK(solve_row_weights<Rational>(3, kLn2) ==
          std::vector<Rational>{q(7, 6), q(2, 3), q(7, 6)});
    CHECK(solve_row_weights<Rational>(1, kLn2) == std::vector<Rational>{q(1)});

    for (int n : {2, 3, 4, 5, 8, 11}) {
        const auto omega = solve_row_weights<Rational>(n, kLn2);
        const auto sigma = single_peaked_matrix<Rational>(n, kLn2);
        for (int i = 0; i < n; ++i) {
            Rational total(0);
            for (int l = 0; l < n; ++l) total += omega[static_cast<size_t>(l)] * sigma(i, l);
            CHECK(total == 1);
        }
        for (const auto& w : omega) CHECK(w > 0);
    }
}

TEST_CASE("row weights match an independent dense solve") {
    // Dense-solve oracle: columns are the single-peaked scales.
    for (int n : {2, 3, 4, 6}) {
        const auto sigma = single_peaked_matrix<Rational>(n, kLn2);
        std::vector<Rational> b(static_cast<size_t>(n), Rational(1));
        const auto x = solve_exact(sigma, b);
        REQUIRE(x.has_value());
        CHECK(*x == solve_row_weights<Rational>(n, kLn2));
    }
    // Interior closed form at n = 4 for l in {1, 2}:
    // (1 - a)/(1 + a) * sum_i a^{|i-l|} with a = lambda^{-1}.
    const auto omega = solve_row_weights<Rational>(4, kLn2);
    const Rational a(1, 2);
    for (int l : {1, 2}) {
        Rational z_l(0);
        for (int i = 0; i < 4; ++i) {
            Rational pw(1);
            for (int rep = 0; rep < std::abs(i - l); ++rep) pw *= a;
            z_l += pw;
        }
        CHECK(omega[static_cast<size_t>(l)] == (1 - a) / (1 + a) * z_l);
    }
}

TEST_CASE("float row weights agree with the rational values") {
    const auto priv_d = Privacy<double>::from_epsilon(std::log(2.0));
    const auto wd = solve_row_weights<double>(5, priv_d);
    const auto wq = solve_row_weights<Rational>(5, kLn2);
    for (int l = 0; l < 5; ++l)
        CHECK(wd[static_cast<size_t>(l)] ==
              doctest::Approx(to_double(wq[static_cast<size_t>(l)])).epsilon(1e-12));
}

TEST_CASE("psi-affinely simplified on the worked representations") {
    const auto psi = example_psi();
    const auto z = uniform_q(3);
    CHECK(psi_affinely_simplified(example_b1(), z, psi));
    CHECK(psi_affinely_simplified(example_b2(), z, psi));
    CHECK(psi_affinely_simplified(example_b3(), z, psi));

    // Midpoint of two distinct extreme points is not simplified.
    Mat<Rational> mid(4, 3);
    for (size_t i = 0; i < mid.a.size(); ++i)
        mid.a[i] = (example_b1().a[i] + example_b2().a[i]) / 2;
    CHECK_FALSE(psi_affinely_simplified(mid, z, psi));

    // The movement matrix B1 - B2 witnesses the failure: z Psi mu = 0, Psi mu 1 = 0.
    Mat<Rational> mu(4, 3);
    for (size_t i = 0; i < mu.a.size(); ++i) mu.a[i] = example_b1().a[i] - example_b2().a[i];
    const auto psimu = matmul(psi, mu);
    const auto zpsimu = vecmat(z.p, psimu);
    for (const auto& v : zpsimu) CHECK(v == 0);
    for (int i = 0; i < 3; ++i) {
        Rational row_sum(0);
        for (int j = 0; j < 3; ++j) row_sum += psimu(i, j);
        CHECK(row_sum == 0);
    }

    // At most one positive entry per column -> empty multiset -> simplified.
    Mat<Rational> sparse(4, 3);
    sparse(0, 0) = q(7, 4);
    sparse(3, 2) = q(7, 4);
    CHECK(psi_affinely_simplified(sparse, z, psi));
}

TEST_CASE("psi-linearly simplified on the worked representations") {
    const auto psi = example_psi();
    CHECK(psi_linearly_simplified(example_b4(), psi));

    Mat<Rational> repeated(4, 3);  // same scale positive in two columns
    repeated(0, 0) = q(1);
    repeated(0, 1) = q(1, 2);
    CHECK_FALSE(psi_linearly_simplified(repeated, psi));

    CHECK(psi_linearly_simplified(Mat<Rational>(4, 3), psi));
}

TEST_SUITE_END();
