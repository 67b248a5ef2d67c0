#include <doctest.h>

#include <cmath>
#include <sstream>

#include "countdist/counts.hpp"
#include "countdist/io.hpp"
#include "countdist/pipeline.hpp"
#include "test_helpers.hpp"

using namespace countdist;
using namespace countdist::testing;

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("rule of thumb split") {
    CHECK(rule_of_thumb_split(1.0) == doctest::Approx(0.106 + 0.533 * std::exp(-2.87)));
    CHECK(rule_of_thumb_split(1.0) == doctest::Approx(0.1362).epsilon(1e-3));
    CHECK(rule_of_thumb_split(1e3) == doctest::Approx(0.106).epsilon(1e-3));
    CHECK(rule_of_thumb_split(1e-6) == doctest::Approx(0.639).epsilon(1e-3));
    CHECK_THROWS_AS(rule_of_thumb_split(0.0), InputError);
}

TEST_CASE("synthetic datasets reproduce their sampling schemes") {
    const auto binom = synthetic_binomial(20, 0.5, 10000, 7);
    CHECK(binom.size() == 10000);
    CHECK(binom.n == 21);
    double mean = 0.0;
    for (auto c : binom.counts) mean += static_cast<double>(c) / 10000.0;
    // variance 20/4 = 5, SE of the mean = sqrt(5/10000)
    CHECK(std::fabs(mean - 10.0) < 4.0 * std::sqrt(5.0 / 10000.0));

    const auto zero_inflated = generate_synthetic(SyntheticKind::kZeroInflated, 3);
    CHECK(zero_inflated.size() == 10000);
    int64_t forced = 0;
    for (size_t i = 9800; i < 10000; ++i)
        if (zero_inflated.counts[i] == 0) ++forced;
    CHECK(forced == 200);

    const auto uniform = generate_synthetic(SyntheticKind::kUniform, 11);
    CHECK(uniform.size() == 3000);
    const auto h = histogram_of(uniform, 30);
    for (auto b : h.bins) {
        const double sd = std::sqrt(3000.0 * (1.0 / 30) * (29.0 / 30));
        CHECK(std::fabs(static_cast<double>(b) - 100.0) < 5.0 * sd);
    }

    const auto top = generate_synthetic(SyntheticKind::kTopInflated, 5);
    int64_t at_top = 0;
    for (size_t i = 9900; i < 10000; ++i)
        if (top.counts[i] == 79) ++at_top;
    CHECK(at_top == 100);

    const auto bimodal = generate_synthetic(SyntheticKind::kBimodalSymmetric, 9);
    CHECK(bimodal.size() == 20000);

    // determinism
    CHECK(generate_synthetic(SyntheticKind::kLeftSkewed, 4).counts ==
          generate_synthetic(SyntheticKind::kLeftSkewed, 4).counts);
}

TEST_CASE("two-stage run: budget accounting, report consistency, determinism") {
    const auto table = synthetic_binomial(8, 0.5, 500, 21);
    PipelineConfig cfg;
    cfg.epsilon_total = 1.2;
    cfg.n = 9;
    cfg.constructor = ConstructorChoice::kHeuristicSandwich;
    cfg.seed = 99;

    const auto [privatized, report] = run_two_stage(table, cfg);
    CHECK(privatized.size() == table.size());
    CHECK(privatized.categories == table.categories);
    for (auto c : privatized.counts) {
        CHECK(c >= 0);
        CHECK(c <= 8);
    }
    CHECK(report.epsilon_1 + report.epsilon_2 == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(report.f == doctest::Approx(rule_of_thumb_split(1.2)));
    CHECK(report.z.size() == 9);
    REQUIRE(report.expected_count_error.has_value());

    // Report's expected count error must match an independent recomputation.
    Distribution<double> z;
    z.p = report.z;
    const auto w = build_weight_matrix(ErrorKind::kEad, z);
    const auto priv = Privacy<double>::from_epsilon(report.epsilon_2);
    const auto t = heuristic_constructor(z, priv, SelectorKind::kSandwich);
    CHECK(*report.expected_count_error == doctest::Approx(count_error(w, t)).epsilon(1e-12));
    CHECK(in_F(t, z, priv));

    const auto [privatized2, report2] = run_two_stage(table, cfg);
    CHECK(privatized2.counts == privatized.counts);
    CHECK(report2.z == report.z);
    CHECK(report2.distribution_error.wasserstein1 == report.distribution_error.wasserstein1);
}

TEST_CASE("split override and floor-z") {
    const auto table = synthetic_binomial(5, 0.5, 300, 21);
    PipelineConfig cfg;
    cfg.epsilon_total = 2.0;
    cfg.split_fraction = 0.25;
    cfg.n = 6;
    cfg.constructor = ConstructorChoice::kLpFixed;
    cfg.floor_z = true;
    cfg.seed = 5;
    const auto [privatized, report] = run_two_stage(table, cfg);
    CHECK(report.epsilon_1 == doctest::Approx(0.5));
    CHECK(report.epsilon_2 == doctest::Approx(1.5));
    for (double v : report.z) CHECK(v >= 1.0 / (10.0 * 300) / 2.0);

    PipelineConfig bad = cfg;
    bad.split_fraction = 1.5;
    CHECK_THROWS_AS(run_two_stage(table, bad), InputError);
}

TEST_CASE("baseline constructors take the whole budget and skip stage one") {
    const auto table = synthetic_binomial(6, 0.5, 400, 21);
    for (auto c : {ConstructorChoice::kTruncatedGeometric, ConstructorChoice::kStaircase,
                   ConstructorChoice::kDiscreteGaussian}) {
        PipelineConfig cfg;
        cfg.epsilon_total = 0.9;
        cfg.n = 7;
        cfg.constructor = c;
        cfg.seed = 17;
        const auto [privatized, report] = run_two_stage(table, cfg);
        CHECK(report.epsilon_1 == 0.0);
        CHECK(report.epsilon_2 == doctest::Approx(0.9));
        CHECK(report.f == 0.0);
        CHECK(report.z.empty());
        CHECK_FALSE(report.expected_count_error.has_value());
        for (auto v : privatized.counts) {
            CHECK(v >= 0);
            CHECK(v <= 6);
        }
        const auto [privatized2, report2] = run_two_stage(table, cfg);
        CHECK(privatized2.counts == privatized.counts);
    }
}

TEST_CASE("rational mode produces an exactly fixed-point mechanism") {
    const auto table = synthetic_binomial(5, 0.4, 200, 21);
    PipelineConfig cfg;
    cfg.epsilon_total = 1.0;
    cfg.n = 6;
    cfg.constructor = ConstructorChoice::kHeuristicSandwich;
    cfg.numeric_mode = NumericMode::kRational;
    cfg.seed = 23;
    const auto [privatized, report] = run_two_stage(table, cfg);
    CHECK(report.numeric_mode == "rational");
    CHECK(privatized.size() == table.size());
}

TEST_CASE("auto selector keeps the best of the three") {
    const auto table = generate_synthetic(SyntheticKind::kLeftSkewed, 2);
    PipelineConfig cfg;
    cfg.epsilon_total = 1.0;
    cfg.n = 70;
    cfg.constructor = ConstructorChoice::kHeuristicAuto;
    cfg.seed = 31;
    const auto [privatized, report] = run_two_stage(table, cfg);
    CHECK((report.selected_selector == "max" || report.selected_selector == "min" ||
           report.selected_selector == "sandwich"));
    REQUIRE(report.expected_count_error.has_value());

    Distribution<double> z;
    z.p = report.z;
    const auto w = build_weight_matrix(ErrorKind::kEad, z);
    const auto priv = Privacy<double>::from_epsilon(report.epsilon_2);
    for (auto sel : {SelectorKind::kMax, SelectorKind::kMin, SelectorKind::kSandwich})
        CHECK(*report.expected_count_error <=
              count_error(w, heuristic_constructor(z, priv, sel)) + 1e-12);
}

TEST_CASE("csv round trip and validation") {
    const auto table = synthetic_binomial(4, 0.5, 50, 21);
    std::ostringstream os;
    write_count_table_csv(os, table);
    std::istringstream is(os.str());
    const auto back = read_count_table_csv(is, 5);
    CHECK(back.counts == table.counts);
    CHECK(back.categories == table.categories);

    std::istringstream bad_header("cat,count\nx,1\n");
    CHECK_THROWS_AS(read_count_table_csv(bad_header, 5), InputError);
    std::istringstream bad_value("category,count\nx,-3\n");
    CHECK_THROWS_AS(read_count_table_csv(bad_value, 5), InputError);
    std::istringstream empty("category,count\n");
    CHECK_THROWS_AS(read_count_table_csv(empty, 5), InputError);

    // Top-coding happens on read.
    std::istringstream high("category,count\nx,9\ny,2\n");
    const auto coded = read_count_table_csv(high, 4);
    CHECK(coded.counts == std::vector<int64_t>{3, 2});
}

TEST_CASE("report serializes to json with the budget identity") {
    const auto table = synthetic_binomial(5, 0.5, 100, 21);
    PipelineConfig cfg;
    cfg.epsilon_total = 0.7;
    cfg.n = 6;
    cfg.constructor = ConstructorChoice::kUnfixedOptimum;
    cfg.seed = 3;
    const auto [privatized, report] = run_two_stage(table, cfg);
    const auto json_text = report_to_json(report);
    CHECK(json_text.find("\"epsilon_total\": 0.7") != std::string::npos);
    CHECK(json_text.find("\"constructor\": \"unfixed-optimum\"") != std::string::npos);
    CHECK(json_text.find("wasserstein1") != std::string::npos);
    CHECK(json_text.find("timings_ms") != std::string::npos);
}

TEST_CASE("bench emits one row per constructor and size") {
    const auto rows = bench({ConstructorChoice::kHeuristicSandwich,
                             ConstructorChoice::kTruncatedGeometric},
                            {8, 16}, 1.0, 1);
    REQUIRE(rows.size() == 4);
    const auto csv = bench_rows_to_csv(rows);
    CHECK(csv.rfind("constructor,n,wall_ms\n", 0) == 0);
    CHECK(csv.find("heuristic-sandwich,8,") != std::string::npos);
    CHECK(csv.find("truncated-geometric,16,") != std::string::npos);
}

TEST_SUITE_END();
