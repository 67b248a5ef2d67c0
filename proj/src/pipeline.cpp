#include "countdist/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "countdist/baselines.hpp"
#include "countdist/counts.hpp"
#include "countdist/errors.hpp"

namespace countdist {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<std::string> numbered_categories(int64_t n, const std::string& prefix) {
    std::vector<std::string> out;
    out.reserve(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

/// Inverse-CDF draw from an explicit pmf.
int64_t draw_pmf(Rng& rng, const std::vector<double>& pmf) {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (size_t i = 0; i < pmf.size(); ++i) {
        acc += pmf[i];
        if (u < acc) return static_cast<int64_t>(i);
    }
    return static_cast<int64_t>(pmf.size()) - 1;
}

std::vector<double> binomial_pmf(int size, double prob) {
    std::vector<double> pmf(static_cast<size_t>(size) + 1, 0.0);
    // log-space recurrence keeps large sizes from underflowing mid-way
    double log_p = static_cast<double>(size) * std::log1p(-prob);
    std::vector<double> logs(pmf.size());
    logs[0] = log_p;
    for (int k = 1; k <= size; ++k) {
        log_p += std::log(static_cast<double>(size - k + 1) / static_cast<double>(k)) +
                 std::log(prob) - std::log1p(-prob);
        logs[static_cast<size_t>(k)] = log_p;
    }
    const double mx = *std::max_element(logs.begin(), logs.end());
    double total = 0.0;
    for (size_t k = 0; k < pmf.size(); ++k) {
        pmf[k] = std::exp(logs[k] - mx);
        total += pmf[k];
    }
    for (auto& v : pmf) v /= total;
    return pmf;
}

/// Target z used by the bench harness: binomial(n-1, 1/2) over {0,...,n-1}.
Distribution<double> bench_distribution(int n) {
    Distribution<double> z;
    z.p = binomial_pmf(n - 1, 0.5);
    return z;
}

TransitionMatrix<double> construct_matrix(ConstructorChoice c, const Distribution<double>& z,
                                          const Privacy<double>& priv, const Mat<double>& w,
                                          int lp_guard, std::string* selected_selector) {
    switch (c) {
        case ConstructorChoice::kHeuristicMax:
            return heuristic_constructor(z, priv, SelectorKind::kMax);
        case ConstructorChoice::kHeuristicMin:
            return heuristic_constructor(z, priv, SelectorKind::kMin);
        case ConstructorChoice::kHeuristicSandwich:
            return heuristic_constructor(z, priv, SelectorKind::kSandwich);
        case ConstructorChoice::kHeuristicAuto: {
            TransitionMatrix<double> best;
            double best_err = 0.0;
            for (SelectorKind sel : {SelectorKind::kMax, SelectorKind::kMin, SelectorKind::kSandwich}) {
                auto t = heuristic_constructor(z, priv, sel);
                const double err = count_error(w, t);
                if (best.rows == 0 || err < best_err) {
                    best = std::move(t);
                    best_err = err;
                    if (selected_selector) *selected_selector = selector_name(sel);
                }
            }
            return best;
        }
        case ConstructorChoice::kLpFixed:
            return lp_fixed_point_constructor(z, priv, w, lp_guard);
        case ConstructorChoice::kUnfixedOptimum:
            return unfixed_optimum_constructor(priv, w, z.size());
        case ConstructorChoice::kTruncatedGeometric:
            return truncated_geometric_matrix(priv, z.size());
        default:
            throw InputError("construct_matrix: constructor has no transition matrix");
    }
}

/// Rational-mode construction: z is lifted to exact rationals (floats are
/// dyadic) and renormalized, lambda is pinned to the dyadic value of e^eps2.
TransitionMatrix<double> construct_matrix_rational(ConstructorChoice c,
                                                   const Distribution<double>& z, double eps2,
                                                   ErrorKind error_kind, int lp_guard,
                                                   std::string* selected_selector) {
    Distribution<Rational> zr;
    zr.p.reserve(z.p.size());
    Rational total(0);
    for (double v : z.p) {
        zr.p.push_back(rational_from_double(v));
        total += zr.p.back();
    }
    if (total <= 0) throw InputError("rational mode: z has no mass");
    for (auto& v : zr.p) v /= total;
    const auto priv = Privacy<Rational>::from_epsilon(eps2);
    const Mat<Rational> w = build_weight_matrix(error_kind, zr);

    Mat<Rational> t;
    switch (c) {
        case ConstructorChoice::kHeuristicMax:
            t = heuristic_constructor(zr, priv, SelectorKind::kMax);
            break;
        case ConstructorChoice::kHeuristicMin:
            t = heuristic_constructor(zr, priv, SelectorKind::kMin);
            break;
        case ConstructorChoice::kHeuristicSandwich:
            t = heuristic_constructor(zr, priv, SelectorKind::kSandwich);
            break;
        case ConstructorChoice::kHeuristicAuto: {
            bool have = false;
            Rational best_err(0);
            for (SelectorKind sel : {SelectorKind::kMax, SelectorKind::kMin, SelectorKind::kSandwich}) {
                auto cand = heuristic_constructor(zr, priv, sel);
                const Rational err = count_error(w, cand);
                if (!have || err < best_err) {
                    t = std::move(cand);
                    best_err = err;
                    have = true;
                    if (selected_selector) *selected_selector = selector_name(sel);
                }
            }
            break;
        }
        case ConstructorChoice::kLpFixed:
            t = lp_fixed_point_constructor(zr, priv, w, lp_guard);
            break;
        case ConstructorChoice::kUnfixedOptimum:
            t = unfixed_optimum_constructor(priv, w, zr.size());
            break;
        case ConstructorChoice::kTruncatedGeometric:
            t = truncated_geometric_matrix(priv, zr.size());
            break;
        default:
            throw InputError("rational mode: constructor has no transition matrix");
    }
    if (constructor_is_fixed_point(c) && !in_F(t, zr, priv, Rational(0)))
        throw InternalError("rational mode: constructed matrix is not exactly in F");
    Mat<double> out(t.rows, t.cols);
    for (size_t i = 0; i < t.a.size(); ++i) out.a[i] = to_double(t.a[i]);
    return out;
}

}  // namespace

ConstructorChoice constructor_from_name(const std::string& name) {
    if (name == "heuristic-max") return ConstructorChoice::kHeuristicMax;
    if (name == "heuristic-min") return ConstructorChoice::kHeuristicMin;
    if (name == "heuristic-sandwich" || name == "heuristic") return ConstructorChoice::kHeuristicSandwich;
    if (name == "heuristic-auto") return ConstructorChoice::kHeuristicAuto;
    if (name == "lp-fixed") return ConstructorChoice::kLpFixed;
    if (name == "unfixed-optimum") return ConstructorChoice::kUnfixedOptimum;
    if (name == "truncated-geometric") return ConstructorChoice::kTruncatedGeometric;
    if (name == "staircase") return ConstructorChoice::kStaircase;
    if (name == "discrete-gaussian") return ConstructorChoice::kDiscreteGaussian;
    throw InputError("unknown constructor: " + name);
}

std::string constructor_name(ConstructorChoice c) {
    switch (c) {
        case ConstructorChoice::kHeuristicMax: return "heuristic-max";
        case ConstructorChoice::kHeuristicMin: return "heuristic-min";
        case ConstructorChoice::kHeuristicSandwich: return "heuristic-sandwich";
        case ConstructorChoice::kHeuristicAuto: return "heuristic-auto";
        case ConstructorChoice::kLpFixed: return "lp-fixed";
        case ConstructorChoice::kUnfixedOptimum: return "unfixed-optimum";
        case ConstructorChoice::kTruncatedGeometric: return "truncated-geometric";
        case ConstructorChoice::kStaircase: return "staircase";
        case ConstructorChoice::kDiscreteGaussian: return "discrete-gaussian";
    }
    return "?";
}

bool constructor_is_two_stage(ConstructorChoice c) {
    switch (c) {
        case ConstructorChoice::kTruncatedGeometric:
        case ConstructorChoice::kStaircase:
        case ConstructorChoice::kDiscreteGaussian:
            return false;
        default:
            return true;
    }
}

bool constructor_is_fixed_point(ConstructorChoice c) {
    switch (c) {
        case ConstructorChoice::kHeuristicMax:
        case ConstructorChoice::kHeuristicMin:
        case ConstructorChoice::kHeuristicSandwich:
        case ConstructorChoice::kHeuristicAuto:
        case ConstructorChoice::kLpFixed:
            return true;
        default:
            return false;
    }
}

double rule_of_thumb_split(double epsilon_total) {
    if (!(epsilon_total > 0)) throw InputError("rule_of_thumb_split: epsilon_total must be > 0");
    return 0.106 + 0.533 * std::exp(-2.87 * epsilon_total);
}

std::pair<CountTable, PipelineReport> run_two_stage(const CountTable& table,
                                                    const PipelineConfig& cfg) {
    if (!(cfg.epsilon_total > 0)) throw InputError("run_two_stage: epsilon_total must be > 0");
    if (cfg.n < 1) throw InputError("run_two_stage: n must be >= 1");
    if (table.counts.empty()) throw InputError("run_two_stage: empty table");
    if (cfg.split_fraction && !(*cfg.split_fraction > 0.0 && *cfg.split_fraction < 1.0))
        throw InputError("run_two_stage: split fraction must be in (0, 1)");

    const auto t_total = Clock::now();
    PipelineReport report;
    report.epsilon_total = cfg.epsilon_total;
    report.constructor = constructor_name(cfg.constructor);
    report.privatizer = privatizer_name(cfg.privatizer);
    report.error_kind = cfg.error_kind == ErrorKind::kEad ? "ead" : "mse";
    report.numeric_mode = cfg.numeric_mode == NumericMode::kFloat ? "float" : "rational";
    report.floor_z = cfg.floor_z;
    report.n = cfg.n;
    report.seed = cfg.seed;

    const bool two_stage = constructor_is_two_stage(cfg.constructor);

    // Step 1: summarize the table by its distribution of counts.
    auto t0 = Clock::now();
    const Histogram eta = histogram_of(table, cfg.n);
    const Distribution<double> zeta = distribution_of(eta);
    const int64_t num_categories = table.size();
    report.categories = num_categories;
    report.timings.summarize_ms = ms_since(t0);

    // Budget split. Unfixed baselines take the entire budget in stage 2.
    const double f = two_stage
                         ? (cfg.split_fraction ? *cfg.split_fraction
                                               : rule_of_thumb_split(cfg.epsilon_total))
                         : 0.0;
    report.f = f;
    report.epsilon_1 = f * cfg.epsilon_total;
    report.epsilon_2 = cfg.epsilon_total - report.epsilon_1;

    // Step 2: privatize the distribution with eps1 and project to the simplex.
    Distribution<double> z;
    t0 = Clock::now();
    if (two_stage) {
        RawPrivatizedDistribution raw;
        switch (cfg.privatizer) {
            case PrivatizerKind::kCyclicLaplace:
                raw = cyclic_laplace(zeta, num_categories, report.epsilon_1,
                                     derive_stream_seed(cfg.seed, 1));
                break;
            case PrivatizerKind::kClassicLaplace:
                raw = classic_laplace(zeta, num_categories, report.epsilon_1,
                                      derive_stream_seed(cfg.seed, 1));
                break;
            case PrivatizerKind::kCyclicGaussian: {
                const double sigma = cfg.cyclic_gaussian_sigma > 0.0
                                         ? cfg.cyclic_gaussian_sigma
                                         : 1.0 / (static_cast<double>(num_categories) *
                                                  report.epsilon_1);
                raw = cyclic_gaussian(zeta, sigma, derive_stream_seed(cfg.seed, 1));
                break;
            }
        }
        z = project_to_simplex(raw);
        if (cfg.floor_z) {
            const double floor = 1.0 / (10.0 * static_cast<double>(num_categories));
            double total = 0.0;
            for (auto& v : z.p) {
                v = std::max(v, floor);
                total += v;
            }
            for (auto& v : z.p) v /= total;
        }
        report.z = z.p;
    }
    report.timings.privatize_ms = ms_since(t0);

    // Step 3: construct the count mechanism with eps2.
    t0 = Clock::now();
    std::optional<TransitionMatrix<double>> t_matrix;
    if (cfg.constructor != ConstructorChoice::kStaircase &&
        cfg.constructor != ConstructorChoice::kDiscreteGaussian) {
        const Distribution<double>& target =
            two_stage ? z : Distribution<double>{};  // truncated geometric ignores z
        if (cfg.numeric_mode == NumericMode::kRational && two_stage) {
            t_matrix = construct_matrix_rational(cfg.constructor, target, report.epsilon_2,
                                                 cfg.error_kind, cfg.lp_capacity_guard,
                                                 &report.selected_selector);
        } else if (cfg.constructor == ConstructorChoice::kTruncatedGeometric) {
            const auto priv = Privacy<double>::from_epsilon(report.epsilon_2);
            t_matrix = truncated_geometric_matrix(priv, cfg.n);
        } else {
            const auto priv = Privacy<double>::from_epsilon(report.epsilon_2);
            const Mat<double> w = build_weight_matrix(cfg.error_kind, z);
            t_matrix = construct_matrix(cfg.constructor, z, priv, w, cfg.lp_capacity_guard,
                                        &report.selected_selector);
        }
    }
    report.timings.construct_ms = ms_since(t0);

    // Step 4: run every row through the mechanism.
    t0 = Clock::now();
    CountTable privatized;
    const uint64_t apply_seed = derive_stream_seed(cfg.seed, 2);
    if (t_matrix) {
        privatized = apply_mechanism(table, *t_matrix, apply_seed);
    } else {
        privatized = table;
        if (cfg.constructor == ConstructorChoice::kStaircase) {
            const double gamma = staircase_default_gamma(report.epsilon_2);
            for (int64_t i = 0; i < table.size(); ++i)
                privatized.counts[static_cast<size_t>(i)] =
                    staircase_mechanism(table.counts[static_cast<size_t>(i)], report.epsilon_2,
                                        gamma, cfg.n, derive_stream_seed(apply_seed, static_cast<uint64_t>(i)));
        } else {
            const double delta = 1.0 / (static_cast<double>(num_categories) + 1.0);
            const double sigma = calibrate_sigma(report.epsilon_2, delta);
            for (int64_t i = 0; i < table.size(); ++i)
                privatized.counts[static_cast<size_t>(i)] =
                    discrete_gaussian_mechanism(table.counts[static_cast<size_t>(i)], sigma, cfg.n,
                                                derive_stream_seed(apply_seed, static_cast<uint64_t>(i)));
        }
    }
    report.timings.apply_ms = ms_since(t0);

    // Step 5: summarize the privatized table and report errors against zeta.
    const Distribution<double> z_hat = distribution_of(histogram_of(privatized, cfg.n));
    report.distribution_error.wasserstein1 =
        distribution_distance(zeta, z_hat, DistanceKind::kWasserstein1);
    report.distribution_error.ks = distribution_distance(zeta, z_hat, DistanceKind::kKs);
    report.distribution_error.tv = distribution_distance(zeta, z_hat, DistanceKind::kTv);

    if (t_matrix && two_stage) {
        const Mat<double> w = build_weight_matrix(cfg.error_kind, z);
        report.expected_count_error = count_error(w, *t_matrix);
    }
    report.timings.total_ms = ms_since(t_total);
    return {std::move(privatized), std::move(report)};
}

SyntheticKind synthetic_kind_from_name(const std::string& name) {
    if (name == "binomial") return SyntheticKind::kBinomial;
    if (name == "uniform") return SyntheticKind::kUniform;
    if (name == "left-skewed") return SyntheticKind::kLeftSkewed;
    if (name == "right-skewed") return SyntheticKind::kRightSkewed;
    if (name == "bimodal-symmetric") return SyntheticKind::kBimodalSymmetric;
    if (name == "zero-inflated") return SyntheticKind::kZeroInflated;
    if (name == "top-inflated") return SyntheticKind::kTopInflated;
    throw InputError("unknown synthetic dataset kind: " + name);
}

CountTable synthetic_binomial(int size, double prob, int64_t num_categories, uint64_t seed) {
    if (size < 1 || !(prob > 0.0 && prob < 1.0) || num_categories < 1)
        throw InputError("synthetic_binomial: bad parameters");
    const auto pmf = binomial_pmf(size, prob);
    Rng rng(derive_stream_seed(seed, 0xb1));
    std::vector<int64_t> counts(static_cast<size_t>(num_categories));
    for (auto& c : counts) c = draw_pmf(rng, pmf);
    return make_count_table(numbered_categories(num_categories, "c"), std::move(counts), size + 1);
}

CountTable synthetic_uniform(int upper_inclusive, int64_t num_categories, uint64_t seed) {
    if (upper_inclusive < 0 || num_categories < 1) throw InputError("synthetic_uniform: bad parameters");
    Rng rng(derive_stream_seed(seed, 0xce));
    std::vector<int64_t> counts(static_cast<size_t>(num_categories));
    for (auto& c : counts)
        c = static_cast<int64_t>(rng.uniform01() * (upper_inclusive + 1));
    return make_count_table(numbered_categories(num_categories, "c"), std::move(counts),
                            upper_inclusive + 1);
}

CountTable generate_synthetic(SyntheticKind kind, uint64_t seed) {
    switch (kind) {
        case SyntheticKind::kBinomial:
            return synthetic_binomial(20, 0.5, 10000, seed);
        case SyntheticKind::kUniform:
            return synthetic_uniform(29, 3000, seed);
        case SyntheticKind::kLeftSkewed:
        case SyntheticKind::kRightSkewed: {
            // p(i) proportional to (139/140)^(69-i) or its mirror over {0..69}
            std::vector<double> pmf(70);
            double v = 1.0, total = 0.0;
            for (int i = 0; i < 70; ++i) {
                pmf[static_cast<size_t>(i)] = v;
                total += v;
                v *= 139.0 / 140.0;
            }
            for (auto& x : pmf) x /= total;
            if (kind == SyntheticKind::kLeftSkewed) std::reverse(pmf.begin(), pmf.end());
            Rng rng(derive_stream_seed(seed, 0x5e));
            std::vector<int64_t> counts(10000);
            for (auto& c : counts) c = draw_pmf(rng, pmf);
            return make_count_table(numbered_categories(10000, "c"), std::move(counts), 70);
        }
        case SyntheticKind::kBimodalSymmetric: {
            const auto lo = binomial_pmf(39, 0.3);
            const auto hi = binomial_pmf(39, 0.7);
            Rng rng(derive_stream_seed(seed, 0xb2));
            std::vector<int64_t> counts;
            counts.reserve(20000);
            for (int64_t i = 0; i < 10000; ++i) counts.push_back(draw_pmf(rng, hi));
            for (int64_t i = 0; i < 10000; ++i) counts.push_back(draw_pmf(rng, lo));
            return make_count_table(numbered_categories(20000, "c"), std::move(counts), 40);
        }
        case SyntheticKind::kZeroInflated: {
            Rng rng(derive_stream_seed(seed, 0x0f));
            std::vector<int64_t> counts;
            counts.reserve(10000);
            for (int64_t i = 0; i < 9800; ++i)
                counts.push_back(static_cast<int64_t>(rng.uniform01() * 80.0));
            for (int64_t i = 0; i < 200; ++i) counts.push_back(0);
            return make_count_table(numbered_categories(10000, "c"), std::move(counts), 80);
        }
        case SyntheticKind::kTopInflated: {
            Rng rng(derive_stream_seed(seed, 0x70));
            std::vector<int64_t> counts;
            counts.reserve(10000);
            for (int64_t i = 0; i < 9900; ++i)
                counts.push_back(static_cast<int64_t>(rng.uniform01() * 80.0));
            for (int64_t i = 0; i < 100; ++i) counts.push_back(79);
            return make_count_table(numbered_categories(10000, "c"), std::move(counts), 80);
        }
    }
    throw InputError("generate_synthetic: unknown kind");
}

std::vector<BenchRow> bench(const std::vector<ConstructorChoice>& constructors,
                            const std::vector<int>& n_values, double epsilon_total,
                            uint64_t seed) {
    std::vector<BenchRow> rows;
    for (const auto c : constructors) {
        for (const int n : n_values) {
            if (n < 1) throw InputError("bench: n must be >= 1");
            const Distribution<double> z = bench_distribution(n);
            const auto priv = Privacy<double>::from_epsilon(epsilon_total);
            Mat<double> w;
            if (c != ConstructorChoice::kTruncatedGeometric &&
                c != ConstructorChoice::kStaircase && c != ConstructorChoice::kDiscreteGaussian)
                w = build_weight_matrix(ErrorKind::kEad, z);
            auto run_once = [&]() {
                switch (c) {
                    case ConstructorChoice::kHeuristicMax:
                        heuristic_constructor(z, priv, SelectorKind::kMax);
                        break;
                    case ConstructorChoice::kHeuristicMin:
                        heuristic_constructor(z, priv, SelectorKind::kMin);
                        break;
                    case ConstructorChoice::kHeuristicAuto:
                    case ConstructorChoice::kHeuristicSandwich:
                        heuristic_constructor(z, priv, SelectorKind::kSandwich);
                        break;
                    case ConstructorChoice::kLpFixed:
                        lp_fixed_point_constructor(z, priv, w);
                        break;
                    case ConstructorChoice::kUnfixedOptimum:
                        unfixed_optimum_constructor(priv, w, n);
                        break;
                    case ConstructorChoice::kTruncatedGeometric:
                        truncated_geometric_matrix(priv, n);
                        break;
                    case ConstructorChoice::kStaircase: {
                        Rng rng(seed);
                        staircase_noise(rng, epsilon_total, staircase_default_gamma(epsilon_total));
                        break;
                    }
                    case ConstructorChoice::kDiscreteGaussian: {
                        Rng rng(seed);
                        sample_discrete_gaussian(rng, calibrate_sigma(epsilon_total, 1e-4));
                        break;
                    }
                }
            };
            run_once();  // warm-up, discarded
            const auto start = Clock::now();
            run_once();
            rows.push_back({constructor_name(c), n, ms_since(start)});
        }
    }
    return rows;
}

}  // namespace countdist
