#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "seqtreat/experiment.hpp"

namespace seqtreat {

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

/// Columns: declared grid axes, seed, regret, modified_regret, s_n, t_i_json,
/// oos_arm, oos_regret. Missing values are empty fields.
std::vector<std::string> csv_header(const std::vector<std::string>& axes);
void write_csv(std::ostream& os, const RunSummary& summary);
void write_csv_file(const std::string& path, const RunSummary& summary);

/// Inverse of write_csv: rows with equal grid keys form one cell (in order of
/// first appearance) and aggregates are recomputed. Failed replications come
/// back with an error marker.
RunSummary read_csv(std::istream& is);
RunSummary read_csv_file(const std::string& path);

/// Header plus rows of raw fields, for generic column access.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;
};
CsvTable read_csv_table(std::istream& is);

}  // namespace seqtreat
