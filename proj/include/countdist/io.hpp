#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "countdist/pipeline.hpp"
#include "countdist/types.hpp"

namespace countdist {

/// CSV count-table format shared by ingestion and output: header line
/// `category,count`, UTF-8, one row per category, base-10 nonneg counts.
/// Counts at or above n-1 are top-coded on read.
CountTable read_count_table_csv(std::istream& in, int n);
CountTable read_count_table_csv_file(const std::string& path, int n);
void write_count_table_csv(std::ostream& out, const CountTable& table);
void write_count_table_csv_file(const std::string& path, const CountTable& table);

std::string report_to_json(const PipelineReport& report);
void write_report_json_file(const std::string& path, const PipelineReport& report);

std::string distribution_errors_to_json(const DistributionErrors& errors);

std::string bench_rows_to_csv(const std::vector<BenchRow>& rows);

}  // namespace countdist
