#include <doctest.h>

#include <cmath>
#include <map>

#include "countdist/baselines.hpp"
#include "countdist/counts.hpp"
#include "test_helpers.hpp"

using namespace countdist;
using namespace countdist::testing;

TEST_SUITE_BEGIN("baselines");

namespace {

const Privacy<Rational> kLn2 = Privacy<Rational>::from_lambda(Rational(2));

}  // namespace

TEST_CASE("truncated geometric closed form") {
    const auto t = truncated_geometric_matrix(kLn2, 3);
    CHECK(t == mat<Rational>({{q(2, 3), q(1, 6), q(1, 6)},
                              {q(1, 3), q(1, 3), q(1, 3)},
                              {q(1, 6), q(1, 6), q(2, 3)}}));
    CHECK(in_U(t, kLn2, Rational(0)));

    // Boundary columns absorb exactly the clamped two-sided geometric tails.
    for (int n : {1, 2, 4, 7}) {
        const auto g = truncated_geometric_matrix(kLn2, n);
        const Rational alpha = q(1, 2);
        for (int i = 0; i < n; ++i) {
            Rational row_sum(0);
            for (int j = 0; j < n; ++j) row_sum += g(i, j);
            CHECK(row_sum == 1);
            if (n == 1) continue;
            // Tail mass oracle: column 0 holds P(i + X <= 0) for two-sided
            // geometric noise X with mass (1-a)/(1+a) a^{|x|}; summed term by
            // term (truncated at 200, hence the loose comparison).
            Rational mass_at_or_below_zero(0);
            const Rational coef = (1 - alpha) / (1 + alpha);
            for (int k = 200; k >= 0; --k) {
                Rational pw(1);
                for (int rep = 0; rep < k + i; ++rep) pw *= alpha;
                mass_at_or_below_zero += coef * pw;
            }
            CHECK(abs_val(Rational(g(i, 0) - mass_at_or_below_zero)) < Rational(1, 1000000));
        }
    }

    // eps -> infinity approaches the identity.
    const auto sharp = truncated_geometric_matrix(Privacy<double>::from_epsilon(30.0), 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(sharp(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-9));
}

TEST_CASE("staircase default gamma and symmetry") {
    CHECK(staircase_default_gamma(1.0) == doctest::Approx(1.0 / (1.0 + std::exp(0.5))));
    CHECK(staircase_default_gamma(1.0) == doctest::Approx(0.37754).epsilon(1e-4));

    Rng rng(77);
    const int reps = 100000;
    double mean = 0.0, m2 = 0.0;
    for (int i = 0; i < reps; ++i) {
        const double x = staircase_noise(rng, 1.0, staircase_default_gamma(1.0));
        const double d = x - mean;
        mean += d / (i + 1);
        m2 += d * (x - mean);
    }
    const double se = std::sqrt(m2 / (reps - 1) / reps);
    CHECK(std::fabs(mean) < 4 * se);
}

TEST_CASE("staircase with gamma 1/2 rounds to the truncated geometric law") {
    const double eps = 1.0;
    const double b = std::exp(-eps);
    Rng rng(78);
    const int reps = 100000;
    std::map<int64_t, int> hist;
    for (int i = 0; i < reps; ++i)
        hist[std::llround(staircase_noise(rng, eps, 0.5))] += 1;

    double tv = 0.0;
    for (int k = -40; k <= 40; ++k) {
        const double expected = (1.0 - b) / (1.0 + b) * std::pow(b, std::fabs(k));
        const double got = hist.count(k) ? static_cast<double>(hist[k]) / reps : 0.0;
        tv += std::fabs(expected - got);
    }
    CHECK(tv / 2.0 < 0.02);
}

TEST_CASE("staircase mechanism output stays in range and is deterministic") {
    for (uint64_t seed = 0; seed < 200; ++seed) {
        const int64_t out = staircase_mechanism(3, 0.4, staircase_default_gamma(0.4), 5, seed);
        CHECK(out >= 0);
        CHECK(out <= 4);
        CHECK(out == staircase_mechanism(3, 0.4, staircase_default_gamma(0.4), 5, seed));
    }
}

TEST_CASE("discrete gaussian sampler variance and near-identity limits") {
    Rng rng(79);
    const double sigma = 20.0;
    const int reps = 100000;
    double mean = 0.0, m2 = 0.0;
    for (int i = 0; i < reps; ++i) {
        const double x = static_cast<double>(sample_discrete_gaussian(rng, sigma));
        const double d = x - mean;
        mean += d / (i + 1);
        m2 += d * (x - mean);
    }
    CHECK(m2 / (reps - 1) == doctest::Approx(sigma * sigma).epsilon(0.05));

    int unchanged = 0;
    for (uint64_t seed = 0; seed < 2000; ++seed)
        if (discrete_gaussian_mechanism(7, 0.01, 20, seed) == 7) ++unchanged;
    CHECK(unchanged >= 1998);  // probability > 0.999 each

    for (uint64_t seed = 0; seed < 100; ++seed) {
        const int64_t out = discrete_gaussian_mechanism(2, 5.0, 4, seed);
        CHECK(out >= 0);
        CHECK(out <= 3);
    }
}

TEST_CASE("sigma calibration is monotone decreasing in epsilon") {
    const double delta = 1e-4;
    double prev = 1e300;
    for (double eps : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const double s = calibrate_sigma(eps, delta);
        CHECK(s < prev);
        prev = s;
    }
    CHECK_THROWS_AS(calibrate_sigma(0.0, delta), InputError);
    CHECK_THROWS_AS(calibrate_sigma(1.0, 1.5), InputError);
}

TEST_SUITE_END();
