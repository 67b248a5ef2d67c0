#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "countdist/errors.hpp"
#include "countdist/rng.hpp"
#include "countdist/types.hpp"

namespace countdist {

/// Two-sided geometric noise clamped to {0,...,n-1}, as a transition matrix.
/// With a = lambda^{-1}: interior column j gets (1-a)/(1+a) a^{|i-j|}, the two
/// boundary columns absorb their clamped tail, a^{|i-j|}/(1+a).
template <class T>
TransitionMatrix<T> truncated_geometric_matrix(const Privacy<T>& p, int n) {
    if (n < 1) throw InputError("truncated_geometric_matrix: n must be >= 1");
    Mat<T> t(n, n);
    if (n == 1) {
        t(0, 0) = T(1);
        return t;
    }
    const T a = p.lambda_inv;
    const T interior = (T(1) - a) / (T(1) + a);
    const T boundary = T(1) / (T(1) + a);
    std::vector<T> pow(static_cast<size_t>(n));
    pow[0] = T(1);
    for (int d = 1; d < n; ++d) pow[static_cast<size_t>(d)] = pow[static_cast<size_t>(d - 1)] * a;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int d = i > j ? i - j : j - i;
            const T& factor = (j == 0 || j == n - 1) ? boundary : interior;
            t(i, j) = factor * pow[static_cast<size_t>(d)];
        }
    }
    return t;
}

/// gamma recommended by the staircase mechanism's authors: minimizes the
/// expected noise amplitude.
inline double staircase_default_gamma(double eps) { return 1.0 / (1.0 + std::exp(eps / 2.0)); }

/// One draw of staircase noise (sensitivity 1) via the mixture form:
/// sign x (geometric layer + position within the step of width gamma/1-gamma).
inline double staircase_noise(Rng& rng, double eps, double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0) throw InputError("staircase: gamma must be in (0, 1]");
    if (!(eps > 0.0)) throw InputError("staircase: epsilon must be > 0");
    const double b = std::exp(-eps);
    const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const uint64_t layer = rng.geometric(b);
    const double u = rng.uniform01();
    const bool outer = rng.bernoulli((1.0 - gamma) * b / (gamma + (1.0 - gamma) * b));
    const double within = outer ? gamma + (1.0 - gamma) * u : gamma * u;
    return sign * (static_cast<double>(layer) + within);
}

/// count + staircase noise, rounded half-away-from-zero, clamped to the range.
inline int64_t staircase_mechanism(int64_t count, double eps, double gamma, int n, uint64_t seed) {
    Rng rng(derive_stream_seed(seed, 0x57a1));
    const double noisy = static_cast<double>(count) + staircase_noise(rng, eps, gamma);
    const int64_t rounded = std::llround(noisy);
    return std::clamp<int64_t>(rounded, 0, n - 1);
}

/// Exact discrete Gaussian sampler: rejection from the two-sided geometric
/// proposal with scale t = floor(sigma) + 1, acceptance
/// exp(-(|y| - sigma^2/t)^2 / (2 sigma^2)).
inline int64_t sample_discrete_gaussian(Rng& rng, double sigma) {
    if (!(sigma > 0.0)) throw InputError("discrete gaussian: sigma must be > 0");
    const double t = std::floor(sigma) + 1.0;
    const double ratio = std::exp(-1.0 / t);
    for (;;) {
        const uint64_t magnitude = rng.geometric(ratio);
        const bool negative = rng.bernoulli(0.5);
        if (negative && magnitude == 0) continue;  // avoid double-counting zero
        const int64_t y = negative ? -static_cast<int64_t>(magnitude) : static_cast<int64_t>(magnitude);
        const double shift = std::fabs(static_cast<double>(y)) - sigma * sigma / t;
        const double accept = std::exp(-shift * shift / (2.0 * sigma * sigma));
        if (rng.bernoulli(accept)) return y;
    }
}

inline int64_t discrete_gaussian_mechanism(int64_t count, double sigma, int n, uint64_t seed) {
    Rng rng(derive_stream_seed(seed, 0xd6a0));
    const int64_t noisy = count + sample_discrete_gaussian(rng, sigma);
    return std::clamp<int64_t>(noisy, 0, n - 1);
}

/// Conservative classical Gaussian calibration with sensitivity 1.
inline double calibrate_sigma(double eps, double delta) {
    if (!(eps > 0.0)) throw InputError("calibrate_sigma: epsilon must be > 0");
    if (!(delta > 0.0) || delta >= 1.0) throw InputError("calibrate_sigma: delta must be in (0, 1)");
    return std::sqrt(2.0 * std::log(1.25 / delta)) / eps;
}

}  // namespace countdist
