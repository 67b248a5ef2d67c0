#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "countdist/errors.hpp"
#include "countdist/rng.hpp"
#include "countdist/types.hpp"

namespace countdist {

enum class PrivatizerKind { kCyclicLaplace, kClassicLaplace, kCyclicGaussian };

inline std::string privatizer_name(PrivatizerKind k) {
    switch (k) {
        case PrivatizerKind::kCyclicLaplace: return "cyclic-laplace";
        case PrivatizerKind::kClassicLaplace: return "classic-laplace";
        case PrivatizerKind::kCyclicGaussian: return "cyclic-gaussian";
    }
    return "?";
}

/// Stage-1 output before simplex projection; entries may be negative.
struct RawPrivatizedDistribution {
    std::vector<double> values;
    PrivatizerKind mechanism = PrivatizerKind::kCyclicLaplace;
};

/// V_i = zeta_i + L_i - L_{i+1} with L_0,...,L_{n-1} iid Laplace(1/(N eps))
/// and L_n = L_0. The differences telescope, so sum V_i = 1 exactly up to
/// float rounding.
inline RawPrivatizedDistribution cyclic_laplace(const Distribution<double>& zeta, int64_t N,
                                                double eps1, uint64_t seed) {
    if (!(eps1 > 0)) throw InputError("cyclic_laplace: epsilon must be > 0");
    if (N < 1) throw InputError("cyclic_laplace: N must be >= 1");
    const int n = zeta.size();
    Rng rng(derive_stream_seed(seed, 0x1ace));
    const double scale = 1.0 / (static_cast<double>(N) * eps1);
    std::vector<double> noise(static_cast<size_t>(n));
    for (auto& l : noise) l = rng.laplace(scale);
    RawPrivatizedDistribution out;
    out.mechanism = PrivatizerKind::kCyclicLaplace;
    out.values.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        out.values[static_cast<size_t>(i)] = zeta.p[i] + noise[i] - noise[(i + 1) % n];
    return out;
}

/// Independent Laplace(2/(N eps)) per bin; the sum is unconstrained.
inline RawPrivatizedDistribution classic_laplace(const Distribution<double>& zeta, int64_t N,
                                                 double eps1, uint64_t seed) {
    if (!(eps1 > 0)) throw InputError("classic_laplace: epsilon must be > 0");
    if (N < 1) throw InputError("classic_laplace: N must be >= 1");
    Rng rng(derive_stream_seed(seed, 0xc1a5));
    const double scale = 2.0 / (static_cast<double>(N) * eps1);
    RawPrivatizedDistribution out;
    out.mechanism = PrivatizerKind::kClassicLaplace;
    out.values.resize(static_cast<size_t>(zeta.size()));
    for (int i = 0; i < zeta.size(); ++i) out.values[static_cast<size_t>(i)] = zeta.p[i] + rng.laplace(scale);
    return out;
}

/// Gaussian analog of the cyclic construction. sigma is exposed directly;
/// callers own the (eps, delta) calibration.
inline RawPrivatizedDistribution cyclic_gaussian(const Distribution<double>& zeta, double sigma,
                                                 uint64_t seed) {
    if (!(sigma > 0)) throw InputError("cyclic_gaussian: sigma must be > 0");
    const int n = zeta.size();
    Rng rng(derive_stream_seed(seed, 0x6a55));
    std::vector<double> noise(static_cast<size_t>(n));
    for (auto& g : noise) g = sigma * rng.gaussian();
    RawPrivatizedDistribution out;
    out.mechanism = PrivatizerKind::kCyclicGaussian;
    out.values.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        out.values[static_cast<size_t>(i)] = zeta.p[i] + noise[i] - noise[(i + 1) % n];
    return out;
}

/// Euclidean projection onto the probability simplex (sort-based O(n log n)),
/// then an exact renormalization of the surviving mass.
inline Distribution<double> project_to_simplex(const std::vector<double>& v) {
    const int n = static_cast<int>(v.size());
    if (n == 0) throw InputError("project_to_simplex: empty vector");
    for (double x : v) {
        if (!std::isfinite(x)) throw InputError("project_to_simplex: non-finite entry");
    }
    std::vector<double> u(v);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cum = 0.0, theta = u[0] - 1.0;
    for (int k = 0; k < n; ++k) {
        cum += u[static_cast<size_t>(k)];
        const double candidate = (cum - 1.0) / static_cast<double>(k + 1);
        if (u[static_cast<size_t>(k)] - candidate > 0.0) theta = candidate;
    }
    Distribution<double> out;
    out.p.resize(static_cast<size_t>(n));
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        out.p[static_cast<size_t>(i)] = std::max(v[static_cast<size_t>(i)] - theta, 0.0);
        total += out.p[static_cast<size_t>(i)];
    }
    if (total <= 0.0) throw InternalError("project_to_simplex: projection lost all mass");
    for (auto& x : out.p) x /= total;
    return out;
}

inline Distribution<double> project_to_simplex(const RawPrivatizedDistribution& raw) {
    return project_to_simplex(raw.values);
}

}  // namespace countdist
