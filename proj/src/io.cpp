#include "countdist/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "countdist/errors.hpp"

namespace countdist {

namespace {

std::string strip(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

}  // namespace

CountTable read_count_table_csv(std::istream& in, int n) {
    std::string line;
    if (!std::getline(in, line)) throw InputError("count table CSV: empty file");
    if (strip(line) != "category,count")
        throw InputError("count table CSV: expected header 'category,count'");
    std::vector<std::string> categories;
    std::vector<int64_t> counts;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string trimmed = strip(line);
        if (trimmed.empty()) continue;
        const size_t comma = trimmed.rfind(',');
        if (comma == std::string::npos)
            throw InputError("count table CSV: missing comma on line " + std::to_string(lineno));
        const std::string cat = trimmed.substr(0, comma);
        const std::string value = strip(trimmed.substr(comma + 1));
        if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
            throw InputError("count table CSV: count must be a nonnegative integer on line " +
                             std::to_string(lineno));
        categories.push_back(cat);
        counts.push_back(std::stoll(value));
    }
    if (counts.empty()) throw InputError("count table CSV: no rows");
    return make_count_table(std::move(categories), std::move(counts), n);
}

CountTable read_count_table_csv_file(const std::string& path, int n) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open count table: " + path);
    return read_count_table_csv(in, n);
}

void write_count_table_csv(std::ostream& out, const CountTable& table) {
    out << "category,count\n";
    for (int64_t i = 0; i < table.size(); ++i)
        out << table.categories[static_cast<size_t>(i)] << ','
            << table.counts[static_cast<size_t>(i)] << '\n';
}

void write_count_table_csv_file(const std::string& path, const CountTable& table) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write count table: " + path);
    write_count_table_csv(out, table);
}

std::string report_to_json(const PipelineReport& report) {
    nlohmann::json j;
    j["epsilon_total"] = report.epsilon_total;
    j["epsilon_1"] = report.epsilon_1;
    j["epsilon_2"] = report.epsilon_2;
    j["f"] = report.f;
    j["constructor"] = report.constructor;
    if (!report.selected_selector.empty()) j["selected_selector"] = report.selected_selector;
    j["privatizer"] = report.privatizer;
    j["error_kind"] = report.error_kind;
    j["numeric_mode"] = report.numeric_mode;
    j["floor_z"] = report.floor_z;
    j["n"] = report.n;
    j["categories"] = report.categories;
    j["seed"] = report.seed;
    if (!report.z.empty()) j["z"] = report.z;
    if (report.expected_count_error) j["expected_count_error"] = *report.expected_count_error;
    j["distribution_error"] = {{"wasserstein1", report.distribution_error.wasserstein1},
                               {"ks", report.distribution_error.ks},
                               {"tv", report.distribution_error.tv}};
    j["timings_ms"] = {{"summarize", report.timings.summarize_ms},
                       {"privatize", report.timings.privatize_ms},
                       {"construct", report.timings.construct_ms},
                       {"apply", report.timings.apply_ms},
                       {"total", report.timings.total_ms}};
    return j.dump(2);
}

void write_report_json_file(const std::string& path, const PipelineReport& report) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write report: " + path);
    out << report_to_json(report) << '\n';
}

std::string distribution_errors_to_json(const DistributionErrors& errors) {
    nlohmann::json j;
    j["wasserstein1"] = errors.wasserstein1;
    j["ks"] = errors.ks;
    j["tv"] = errors.tv;
    return j.dump(2);
}

std::string bench_rows_to_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "constructor,n,wall_ms\n";
    for (const auto& row : rows) os << row.constructor << ',' << row.n << ',' << row.wall_ms << '\n';
    return os.str();
}

}  // namespace countdist
