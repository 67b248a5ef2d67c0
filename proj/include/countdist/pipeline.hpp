#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "countdist/constructors.hpp"
#include "countdist/metrics.hpp"
#include "countdist/privatizers.hpp"
#include "countdist/types.hpp"

namespace countdist {

enum class ConstructorChoice {
    kHeuristicMax,
    kHeuristicMin,
    kHeuristicSandwich,
    kHeuristicAuto,  // all three selectors, keep the lowest <W,T>
    kLpFixed,
    kUnfixedOptimum,
    kTruncatedGeometric,
    kStaircase,
    kDiscreteGaussian,
};

ConstructorChoice constructor_from_name(const std::string& name);
std::string constructor_name(ConstructorChoice c);
bool constructor_is_two_stage(ConstructorChoice c);
bool constructor_is_fixed_point(ConstructorChoice c);

enum class NumericMode { kFloat, kRational };

struct PipelineConfig {
    double epsilon_total = 1.0;
    std::optional<double> split_fraction;  // defaults to the rule of thumb
    int n = 0;
    PrivatizerKind privatizer = PrivatizerKind::kCyclicLaplace;
    ConstructorChoice constructor = ConstructorChoice::kHeuristicSandwich;
    ErrorKind error_kind = ErrorKind::kEad;
    uint64_t seed = 0;
    NumericMode numeric_mode = NumericMode::kFloat;
    bool floor_z = false;
    int lp_capacity_guard = 64;
    double cyclic_gaussian_sigma = 0.0;  // 0 -> 1/(N eps1) default scale
};

struct DistributionErrors {
    double wasserstein1 = 0.0;
    double ks = 0.0;
    double tv = 0.0;
};

struct StageTimings {
    double summarize_ms = 0.0;
    double privatize_ms = 0.0;
    double construct_ms = 0.0;
    double apply_ms = 0.0;
    double total_ms = 0.0;
};

struct PipelineReport {
    double epsilon_total = 0.0;
    double epsilon_1 = 0.0;
    double epsilon_2 = 0.0;
    double f = 0.0;
    std::string constructor;
    std::string selected_selector;  // filled for the auto constructor
    std::string privatizer;
    std::string error_kind;
    std::string numeric_mode;
    bool floor_z = false;
    int n = 0;
    int64_t categories = 0;
    uint64_t seed = 0;
    std::vector<double> z;                        // post-projection target, two-stage runs
    std::optional<double> expected_count_error;   // <W, T> where a matrix and z exist
    DistributionErrors distribution_error;        // zeta vs observed output distribution
    StageTimings timings;
};

/// Fitted budget-split rule of thumb f(eps_t) = 0.106 + 0.533 exp(-2.87 eps_t).
double rule_of_thumb_split(double epsilon_total);

/// The five-step two-stage run: summarize, privatize the distribution with
/// eps1, construct a count mechanism with eps2, apply it row-wise, report.
/// Unfixed baselines skip the first stages and receive the whole budget.
std::pair<CountTable, PipelineReport> run_two_stage(const CountTable& table,
                                                    const PipelineConfig& cfg);

enum class SyntheticKind {
    kBinomial,
    kUniform,
    kLeftSkewed,
    kRightSkewed,
    kBimodalSymmetric,
    kZeroInflated,
    kTopInflated,
};

SyntheticKind synthetic_kind_from_name(const std::string& name);

/// Named synthetic datasets with their published sampling schemes; binomial is
/// parametric (size, p, N), the rest use their fixed mixture sizes.
CountTable generate_synthetic(SyntheticKind kind, uint64_t seed);
CountTable synthetic_binomial(int size, double prob, int64_t num_categories, uint64_t seed);
CountTable synthetic_uniform(int upper_inclusive, int64_t num_categories, uint64_t seed);

struct BenchRow {
    std::string constructor;
    int n = 0;
    double wall_ms = 0.0;
};

/// One timed construction per (constructor, n); a warm-up run is discarded.
std::vector<BenchRow> bench(const std::vector<ConstructorChoice>& constructors,
                            const std::vector<int>& n_values, double epsilon_total, uint64_t seed);

}  // namespace countdist
