#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "prunelab/harness/sweep.hpp"
#include "prunelab/practice.hpp"

namespace prunelab::harness {

const std::vector<std::string>& sweep_columns();

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::string sweep_csv_string(const std::vector<SweepRow>& rows);
/// Throws InvalidArgument naming missing or unexpected columns.
std::vector<SweepRow> read_sweep_csv(std::istream& in);

void write_dp_csv(std::ostream& out, const DPHistory& history);

/// Untyped CSV: header plus string cells. No quoting; fields never contain
/// commas in this project's files.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index or -1.
    int column(const std::string& name) const;
};
Table read_table(std::istream& in);

/// Adds `kept` (n * p) and `ratio` (1 / p) when n and p are present and the
/// columns are not already there.
Table with_derived_columns(Table table);
Table read_table_file(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace prunelab::harness
