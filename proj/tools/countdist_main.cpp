// countdist: privatize tables of counts while preserving the distribution of
// counts. Subcommands: privatize, analyze, enumerate, bench, split-budget.
//
// Exit codes: 0 success, 2 input error, 3 capacity guard, 4 internal error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "countdist/counts.hpp"
#include "countdist/errors.hpp"
#include "countdist/io.hpp"
#include "countdist/pipeline.hpp"
#include "countdist/polytopes.hpp"

namespace {

using namespace countdist;

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

/// "a:b:step" inclusive; "a:b:xk" multiplies by k instead of adding.
std::vector<int> parse_n_range(const std::string& text) {
    const auto parts = split_list(text, ':');
    if (parts.size() != 3) throw InputError("n-range must look like a:b:step or a:b:xk");
    const int a = std::stoi(parts[0]);
    const int b = std::stoi(parts[1]);
    std::vector<int> out;
    if (parts[2].size() > 1 && parts[2][0] == 'x') {
        const int k = std::stoi(parts[2].substr(1));
        if (a < 1 || k < 2) throw InputError("geometric n-range needs a >= 1 and factor >= 2");
        for (long long n = a; n <= b; n *= k) out.push_back(static_cast<int>(n));
    } else {
        const int step = std::stoi(parts[2]);
        if (step < 1) throw InputError("n-range step must be >= 1");
        for (long long n = a; n <= b; n += step) out.push_back(static_cast<int>(n));
    }
    if (out.empty()) throw InputError("n-range is empty");
    return out;
}

int run_privatize(const std::string& input, const std::string& output, const std::string& report_path,
                  double epsilon_total, double split, int n, const std::string& constructor,
                  const std::string& selector, const std::string& privatizer,
                  const std::string& error_kind, uint64_t seed, bool floor_z,
                  const std::string& numeric_mode) {
    PipelineConfig cfg;
    cfg.epsilon_total = epsilon_total;
    if (split >= 0.0) cfg.split_fraction = split;
    cfg.n = n;
    cfg.seed = seed;
    cfg.floor_z = floor_z;

    std::string constructor_key = constructor;
    if (constructor == "heuristic") constructor_key = "heuristic-" + selector;
    cfg.constructor = constructor_from_name(constructor_key);

    if (privatizer == "cyclic-laplace") cfg.privatizer = PrivatizerKind::kCyclicLaplace;
    else if (privatizer == "classic-laplace") cfg.privatizer = PrivatizerKind::kClassicLaplace;
    else if (privatizer == "cyclic-gaussian") cfg.privatizer = PrivatizerKind::kCyclicGaussian;
    else throw InputError("unknown privatizer: " + privatizer);

    if (error_kind == "ead") cfg.error_kind = ErrorKind::kEad;
    else if (error_kind == "mse") cfg.error_kind = ErrorKind::kMse;
    else throw InputError("unknown error kind: " + error_kind);

    if (numeric_mode == "float") cfg.numeric_mode = NumericMode::kFloat;
    else if (numeric_mode == "rational") cfg.numeric_mode = NumericMode::kRational;
    else throw InputError("unknown numeric mode: " + numeric_mode);

    const CountTable table = read_count_table_csv_file(input, n);
    const auto [privatized, report] = run_two_stage(table, cfg);
    write_count_table_csv_file(output, privatized);
    if (!report_path.empty()) write_report_json_file(report_path, report);
    std::cout << "wrote " << privatized.size() << " privatized counts to " << output << "\n";
    return 0;
}

int run_analyze(const std::string& original, const std::string& privatized, int n) {
    const auto a = distribution_of<double>(histogram_of(read_count_table_csv_file(original, n), n));
    const auto b = distribution_of<double>(histogram_of(read_count_table_csv_file(privatized, n), n));
    DistributionErrors errors;
    errors.wasserstein1 = distribution_distance(a, b, DistanceKind::kWasserstein1);
    errors.ks = distribution_distance(a, b, DistanceKind::kKs);
    errors.tv = distribution_distance(a, b, DistanceKind::kTv);
    std::cout << distribution_errors_to_json(errors) << "\n";
    return 0;
}

int run_enumerate(const std::string& polytope, int n, const std::string& lambda_text,
                  const std::string& fixed_point) {
    PolytopeDescriptor desc;
    desc.kind = polytope_kind_from_name(polytope);
    desc.n = n;
    desc.lambda = parse_rational(lambda_text);
    const bool needs_z = desc.kind == PolytopeKind::kF || desc.kind == PolytopeKind::kRF;
    if (needs_z) {
        if (fixed_point == "uniform") {
            desc.z.p.assign(static_cast<size_t>(n), Rational(1) / Rational(n));
        } else {
            for (const auto& part : split_list(fixed_point, ','))
                desc.z.p.push_back(parse_rational(part));
            if (desc.z.size() != n)
                throw InputError("fixed point must have exactly n rational entries");
        }
    }
    const auto vertices = enumerate_vertices(desc);

    nlohmann::json j;
    j["kind"] = polytope_kind_name(desc.kind);
    j["n"] = n;
    j["lambda"] = rational_to_string(desc.lambda);
    if (needs_z) {
        std::vector<std::string> z_text;
        for (const auto& v : desc.z.p) z_text.push_back(rational_to_string(v));
        j["z"] = z_text;
    } else {
        j["z"] = nullptr;
    }
    j["count"] = vertices.vertices.size();
    nlohmann::json verts = nlohmann::json::array();
    for (const auto& m : vertices.vertices) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < m.rows; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int jj = 0; jj < m.cols; ++jj) row.push_back(rational_to_string(m(i, jj)));
            rows.push_back(row);
        }
        verts.push_back(rows);
    }
    j["vertices"] = verts;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int run_bench(const std::string& constructors_text, const std::string& n_range,
              double epsilon_total, uint64_t seed, const std::string& output) {
    std::vector<ConstructorChoice> constructors;
    for (const auto& name : split_list(constructors_text, ','))
        constructors.push_back(constructor_from_name(name));
    if (constructors.empty()) throw InputError("bench needs at least one constructor");
    const auto n_values = parse_n_range(n_range);

    std::vector<BenchRow> rows;
    for (const auto c : constructors) {
        for (const int n : n_values) {
            try {
                const auto sub = bench({c}, {n}, epsilon_total, seed);
                rows.insert(rows.end(), sub.begin(), sub.end());
            } catch (const CapacityError& e) {
                std::cerr << "skipping " << constructor_name(c) << " at n=" << n << ": "
                          << e.what() << "\n";
            }
        }
    }
    const auto csv = bench_rows_to_csv(rows);
    if (output.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(output);
        if (!out) throw InputError("cannot write bench output: " + output);
        out << csv;
    }
    return 0;
}

int run_split_budget(double epsilon_total) {
    const double f = rule_of_thumb_split(epsilon_total);
    nlohmann::json j;
    j["f"] = f;
    j["epsilon_1"] = f * epsilon_total;
    j["epsilon_2"] = epsilon_total - f * epsilon_total;
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distribution-preserving privatization of tables of counts"};
    app.require_subcommand(1);

    auto* privatize = app.add_subcommand("privatize", "Run the two-stage privatization pipeline");
    std::string input, output, report_path, constructor = "heuristic-sandwich";
    std::string selector = "sandwich", privatizer = "cyclic-laplace", error_kind = "ead";
    std::string numeric_mode = "float";
    double epsilon_total = 0.0, split = -1.0;
    int n = 0;
    uint64_t seed = 0;
    bool floor_z = false;
    privatize->add_option("--input", input, "Input count-table CSV")->required();
    privatize->add_option("--output", output, "Output count-table CSV")->required();
    privatize->add_option("--report", report_path, "Pipeline report JSON path");
    privatize->add_option("--epsilon-total", epsilon_total, "Total privacy budget")->required();
    privatize->add_option("--split", split, "Fraction of the budget for stage 1 (default: rule of thumb)");
    privatize->add_option("--n", n, "Counts live in {0,...,n-1}")->required();
    privatize->add_option("--constructor", constructor,
                          "heuristic|heuristic-max|heuristic-min|heuristic-sandwich|heuristic-auto|"
                          "lp-fixed|unfixed-optimum|truncated-geometric|staircase|discrete-gaussian");
    privatize->add_option("--selector", selector, "max|min|sandwich|auto (with --constructor heuristic)");
    privatize->add_option("--privatizer", privatizer, "cyclic-laplace|classic-laplace|cyclic-gaussian");
    privatize->add_option("--error", error_kind, "ead|mse");
    privatize->add_option("--seed", seed, "64-bit seed")->required();
    privatize->add_flag("--floor-z", floor_z, "Clamp z entries to 1/(10N) and renormalize");
    privatize->add_option("--numeric-mode", numeric_mode, "float|rational");

    auto* analyze = app.add_subcommand("analyze", "Distribution distances between two count tables");
    std::string original, privatized_path;
    int analyze_n = 0;
    analyze->add_option("--original", original, "Original count-table CSV")->required();
    analyze->add_option("--privatized", privatized_path, "Privatized count-table CSV")->required();
    analyze->add_option("--n", analyze_n, "Counts live in {0,...,n-1}")->required();

    auto* enumerate = app.add_subcommand("enumerate", "Exact extreme-point enumeration");
    std::string polytope, lambda_text = "2", fixed_point = "uniform";
    int enum_n = 0;
    enumerate->add_option("--polytope", polytope, "F|U|RF|RU")->required();
    enumerate->add_option("--n", enum_n, "Dimension")->required();
    enumerate->add_option("--lambda", lambda_text, "lambda = e^eps as a rational p/q");
    enumerate->add_option("--fixed-point", fixed_point, "uniform or comma-separated rationals");

    auto* bench_cmd = app.add_subcommand("bench", "Time constructor runs over a range of n");
    std::string constructors_text, n_range, bench_output;
    double bench_epsilon = 1.0;
    uint64_t bench_seed = 0;
    bench_cmd->add_option("--constructors", constructors_text, "Comma-separated constructor names")
        ->required();
    bench_cmd->add_option("--n-range", n_range, "a:b:step (arithmetic) or a:b:xk (geometric)")
        ->required();
    bench_cmd->add_option("--epsilon-total", bench_epsilon, "Privacy budget")->required();
    bench_cmd->add_option("--seed", bench_seed, "64-bit seed")->required();
    bench_cmd->add_option("--output", bench_output, "CSV path (default: stdout)");

    auto* split_cmd = app.add_subcommand("split-budget", "Print the rule-of-thumb budget split");
    double split_epsilon = 0.0;
    split_cmd->add_option("--epsilon-total", split_epsilon, "Total privacy budget")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 2;
    }

    try {
        if (privatize->parsed())
            return run_privatize(input, output, report_path, epsilon_total, split, n, constructor,
                                 selector, privatizer, error_kind, seed, floor_z, numeric_mode);
        if (analyze->parsed()) return run_analyze(original, privatized_path, analyze_n);
        if (enumerate->parsed()) return run_enumerate(polytope, enum_n, lambda_text, fixed_point);
        if (bench_cmd->parsed())
            return run_bench(constructors_text, n_range, bench_epsilon, bench_seed, bench_output);
        if (split_cmd->parsed()) return run_split_budget(split_epsilon);
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 3;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
