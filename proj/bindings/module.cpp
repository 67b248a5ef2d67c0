// Python bindings for the main operations: the two-stage pipeline, the
// individual privatizers and constructors, metrics, and the exact polytope
// enumeration (rationals cross the boundary as "p/q" strings).

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "countdist/baselines.hpp"
#include "countdist/constructors.hpp"
#include "countdist/counts.hpp"
#include "countdist/io.hpp"
#include "countdist/metrics.hpp"
#include "countdist/pipeline.hpp"
#include "countdist/polytopes.hpp"
#include "countdist/scales.hpp"

namespace py = pybind11;
using namespace countdist;

namespace {

using DoubleMatrix = std::vector<std::vector<double>>;

DoubleMatrix to_rows(const Mat<double>& m) {
    DoubleMatrix out(static_cast<size_t>(m.rows), std::vector<double>(static_cast<size_t>(m.cols)));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) out[static_cast<size_t>(i)][static_cast<size_t>(j)] = m(i, j);
    return out;
}

Mat<double> from_rows(const DoubleMatrix& rows) {
    if (rows.empty()) throw InputError("matrix must be nonempty");
    Mat<double> m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw InputError("matrix rows differ in length");
        for (size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
    return m;
}

Distribution<double> to_distribution(const std::vector<double>& p) {
    Distribution<double> d;
    d.p = p;
    return d;
}

ErrorKind error_kind_from(const std::string& name) {
    if (name == "ead") return ErrorKind::kEad;
    if (name == "mse") return ErrorKind::kMse;
    throw InputError("unknown error kind: " + name);
}

SelectorKind selector_from(const std::string& name) {
    if (name == "max") return SelectorKind::kMax;
    if (name == "min") return SelectorKind::kMin;
    if (name == "sandwich") return SelectorKind::kSandwich;
    throw InputError("unknown selector: " + name);
}

DistanceKind distance_from(const std::string& name) {
    if (name == "wasserstein1") return DistanceKind::kWasserstein1;
    if (name == "ks") return DistanceKind::kKs;
    if (name == "tv") return DistanceKind::kTv;
    throw InputError("unknown distance kind: " + name);
}

py::dict report_to_dict(const PipelineReport& r) {
    py::dict d;
    d["epsilon_total"] = r.epsilon_total;
    d["epsilon_1"] = r.epsilon_1;
    d["epsilon_2"] = r.epsilon_2;
    d["f"] = r.f;
    d["constructor"] = r.constructor;
    if (!r.selected_selector.empty()) d["selected_selector"] = r.selected_selector;
    d["privatizer"] = r.privatizer;
    d["error_kind"] = r.error_kind;
    d["numeric_mode"] = r.numeric_mode;
    d["floor_z"] = r.floor_z;
    d["n"] = r.n;
    d["categories"] = r.categories;
    d["seed"] = r.seed;
    d["z"] = r.z;
    if (r.expected_count_error) d["expected_count_error"] = *r.expected_count_error;
    py::dict errors;
    errors["wasserstein1"] = r.distribution_error.wasserstein1;
    errors["ks"] = r.distribution_error.ks;
    errors["tv"] = r.distribution_error.tv;
    d["distribution_error"] = errors;
    py::dict timings;
    timings["summarize"] = r.timings.summarize_ms;
    timings["privatize"] = r.timings.privatize_ms;
    timings["construct"] = r.timings.construct_ms;
    timings["apply"] = r.timings.apply_ms;
    timings["total"] = r.timings.total_ms;
    d["timings_ms"] = timings;
    return d;
}

}  // namespace

PYBIND11_MODULE(_countdist, m) {
    m.doc() = "Distribution-preserving differentially private count mechanisms";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);
    py::register_exception<InternalError>(m, "InternalError", PyExc_RuntimeError);

    m.def("rule_of_thumb_split", &rule_of_thumb_split, py::arg("epsilon_total"),
          "Fitted budget-split fraction f(eps_t) = 0.106 + 0.533 exp(-2.87 eps_t)");

    m.def(
        "split_budget",
        [](double epsilon_total) {
            const double f = rule_of_thumb_split(epsilon_total);
            py::dict d;
            d["f"] = f;
            d["epsilon_1"] = f * epsilon_total;
            d["epsilon_2"] = epsilon_total - f * epsilon_total;
            return d;
        },
        py::arg("epsilon_total"));

    m.def(
        "privatize_counts",
        [](const std::vector<int64_t>& counts, int n, double epsilon_total,
           const std::string& constructor, const std::string& privatizer,
           const std::string& error_kind, uint64_t seed, std::optional<double> split,
           bool floor_z, const std::string& numeric_mode) {
            std::vector<std::string> cats;
            cats.reserve(counts.size());
            for (size_t i = 0; i < counts.size(); ++i) cats.push_back("c" + std::to_string(i));
            const auto table = make_count_table(std::move(cats), counts, n);
            PipelineConfig cfg;
            cfg.epsilon_total = epsilon_total;
            cfg.n = n;
            cfg.constructor = constructor_from_name(constructor);
            if (privatizer == "cyclic-laplace") cfg.privatizer = PrivatizerKind::kCyclicLaplace;
            else if (privatizer == "classic-laplace") cfg.privatizer = PrivatizerKind::kClassicLaplace;
            else if (privatizer == "cyclic-gaussian") cfg.privatizer = PrivatizerKind::kCyclicGaussian;
            else throw InputError("unknown privatizer: " + privatizer);
            cfg.error_kind = error_kind_from(error_kind);
            cfg.seed = seed;
            cfg.split_fraction = split;
            cfg.floor_z = floor_z;
            cfg.numeric_mode =
                numeric_mode == "rational" ? NumericMode::kRational : NumericMode::kFloat;
            auto [privatized, report] = run_two_stage(table, cfg);
            return py::make_tuple(privatized.counts, report_to_dict(report));
        },
        py::arg("counts"), py::arg("n"), py::arg("epsilon_total"),
        py::arg("constructor") = "heuristic-sandwich", py::arg("privatizer") = "cyclic-laplace",
        py::arg("error") = "ead", py::arg("seed") = 0, py::arg("split") = std::nullopt,
        py::arg("floor_z") = false, py::arg("numeric_mode") = "float",
        "Run the two-stage privatization pipeline on a list of counts");

    m.def(
        "cyclic_laplace",
        [](const std::vector<double>& zeta, int64_t num_categories, double eps, uint64_t seed) {
            return cyclic_laplace(to_distribution(zeta), num_categories, eps, seed).values;
        },
        py::arg("zeta"), py::arg("num_categories"), py::arg("epsilon"), py::arg("seed") = 0);
    m.def(
        "classic_laplace",
        [](const std::vector<double>& zeta, int64_t num_categories, double eps, uint64_t seed) {
            return classic_laplace(to_distribution(zeta), num_categories, eps, seed).values;
        },
        py::arg("zeta"), py::arg("num_categories"), py::arg("epsilon"), py::arg("seed") = 0);
    m.def(
        "cyclic_gaussian",
        [](const std::vector<double>& zeta, double sigma, uint64_t seed) {
            return cyclic_gaussian(to_distribution(zeta), sigma, seed).values;
        },
        py::arg("zeta"), py::arg("sigma"), py::arg("seed") = 0);
    m.def(
        "project_to_simplex",
        [](const std::vector<double>& v) { return project_to_simplex(v).p; }, py::arg("values"));

    m.def(
        "heuristic_constructor",
        [](const std::vector<double>& z, double epsilon, const std::string& selector) {
            const auto priv = Privacy<double>::from_epsilon(epsilon);
            return to_rows(heuristic_constructor(to_distribution(z), priv, selector_from(selector)));
        },
        py::arg("z"), py::arg("epsilon"), py::arg("selector") = "sandwich");
    m.def(
        "lp_fixed_point_constructor",
        [](const std::vector<double>& z, double epsilon, const std::string& error_kind) {
            const auto priv = Privacy<double>::from_epsilon(epsilon);
            const auto zd = to_distribution(z);
            const auto w = build_weight_matrix(error_kind_from(error_kind), zd);
            return to_rows(lp_fixed_point_constructor(zd, priv, w));
        },
        py::arg("z"), py::arg("epsilon"), py::arg("error") = "ead");
    m.def(
        "unfixed_optimum_constructor",
        [](const std::vector<double>& z, double epsilon, const std::string& error_kind) {
            const auto priv = Privacy<double>::from_epsilon(epsilon);
            const auto zd = to_distribution(z);
            const auto w = build_weight_matrix(error_kind_from(error_kind), zd);
            return to_rows(unfixed_optimum_constructor(priv, w, zd.size()));
        },
        py::arg("z"), py::arg("epsilon"), py::arg("error") = "ead");
    m.def(
        "truncated_geometric_matrix",
        [](double epsilon, int n) {
            return to_rows(truncated_geometric_matrix(Privacy<double>::from_epsilon(epsilon), n));
        },
        py::arg("epsilon"), py::arg("n"));

    m.def(
        "apply_mechanism",
        [](const std::vector<int64_t>& counts, const DoubleMatrix& t, uint64_t seed) {
            const auto tm = from_rows(t);
            std::vector<std::string> cats;
            cats.reserve(counts.size());
            for (size_t i = 0; i < counts.size(); ++i) cats.push_back("c" + std::to_string(i));
            const auto table = make_count_table(std::move(cats), counts, tm.rows);
            return apply_mechanism(table, tm, seed).counts;
        },
        py::arg("counts"), py::arg("transition_matrix"), py::arg("seed") = 0);

    m.def(
        "neighbor_indistinguishable",
        [](const std::vector<double>& v, double epsilon) {
            return neighbor_indistinguishable(v, Privacy<double>::from_epsilon(epsilon));
        },
        py::arg("v"), py::arg("epsilon"));
    m.def(
        "in_F",
        [](const DoubleMatrix& t, const std::vector<double>& z, double epsilon) {
            return in_F(from_rows(t), to_distribution(z), Privacy<double>::from_epsilon(epsilon));
        },
        py::arg("transition_matrix"), py::arg("z"), py::arg("epsilon"));
    m.def(
        "is_extreme_in_F",
        [](const DoubleMatrix& t, const std::vector<double>& z, double epsilon) {
            return is_extreme_in_F(from_rows(t), to_distribution(z),
                                   Privacy<double>::from_epsilon(epsilon));
        },
        py::arg("transition_matrix"), py::arg("z"), py::arg("epsilon"));

    m.def(
        "distribution_distance",
        [](const std::vector<double>& a, const std::vector<double>& b, const std::string& kind) {
            return distribution_distance(to_distribution(a), to_distribution(b),
                                         distance_from(kind));
        },
        py::arg("a"), py::arg("b"), py::arg("kind") = "wasserstein1");
    m.def(
        "build_weight_matrix",
        [](const std::string& kind, const std::vector<double>& z) {
            return to_rows(build_weight_matrix(error_kind_from(kind), to_distribution(z)));
        },
        py::arg("kind"), py::arg("z"));
    m.def(
        "count_error",
        [](const DoubleMatrix& w, const DoubleMatrix& t) {
            return count_error(from_rows(w), from_rows(t));
        },
        py::arg("weight_matrix"), py::arg("transition_matrix"));
    m.def(
        "analytic_output_variance",
        [](const std::vector<double>& zeta, const DoubleMatrix& t, int64_t num_categories) {
            return analytic_output_variance(to_distribution(zeta), from_rows(t), num_categories);
        },
        py::arg("zeta"), py::arg("transition_matrix"), py::arg("num_categories"));

    m.def(
        "enumerate_polytope",
        [](const std::string& kind, int n, const std::string& lambda,
           std::optional<std::vector<std::string>> z) {
            PolytopeDescriptor desc;
            desc.kind = polytope_kind_from_name(kind);
            desc.n = n;
            desc.lambda = parse_rational(lambda);
            if (desc.kind == PolytopeKind::kF || desc.kind == PolytopeKind::kRF) {
                if (z) {
                    for (const auto& part : *z) desc.z.p.push_back(parse_rational(part));
                } else {
                    desc.z.p.assign(static_cast<size_t>(n), Rational(1) / Rational(n));
                }
            }
            const auto result = enumerate_vertices(desc);
            std::vector<std::vector<std::vector<std::string>>> vertices;
            for (const auto& mtx : result.vertices) {
                std::vector<std::vector<std::string>> rows;
                for (int i = 0; i < mtx.rows; ++i) {
                    std::vector<std::string> row;
                    for (int j = 0; j < mtx.cols; ++j) row.push_back(rational_to_string(mtx(i, j)));
                    rows.push_back(std::move(row));
                }
                vertices.push_back(std::move(rows));
            }
            py::dict d;
            d["kind"] = kind;
            d["n"] = n;
            d["lambda"] = lambda;
            d["count"] = vertices.size();
            d["vertices"] = vertices;
            return d;
        },
        py::arg("kind"), py::arg("n"), py::arg("lambda") = "2", py::arg("z") = std::nullopt,
        "Exact extreme-point enumeration; rationals as 'p/q' strings");

    m.def(
        "synthetic_counts",
        [](const std::string& kind, uint64_t seed) {
            return generate_synthetic(synthetic_kind_from_name(kind), seed).counts;
        },
        py::arg("kind"), py::arg("seed") = 0);
    m.def(
        "synthetic_binomial_counts",
        [](int size, double prob, int64_t num_categories, uint64_t seed) {
            return synthetic_binomial(size, prob, num_categories, seed).counts;
        },
        py::arg("size"), py::arg("prob"), py::arg("num_categories"), py::arg("seed") = 0);

    m.attr("__version__") = "0.1.0";
}
