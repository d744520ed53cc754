#pragma once

#include <iosfwd>
#include <vector>

#include "prunelab/harness/sweep.hpp"

namespace prunelab::harness {

struct ComparisonRow {
    long cell_id = 0;
    double theory_error = 0.0;
    double empirical_mean = 0.0;
    double empirical_std = 0.0;
    int trials = 0;
    double abs_deviation = 0.0;
    // (empirical - theory) / (std / sqrt(trials)); 0 when std == 0 and the
    // two agree exactly, +-inf when std == 0 and they differ.
    double z_score = 0.0;
};

struct ComparisonSummary {
    int cells = 0;
    int skipped = 0;  // rows without both theory and empirics
    double max_abs_deviation = 0.0;
    double fraction_within = 0.0;  // |z| <= z_tolerance
    double z_tolerance = 3.0;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    ComparisonSummary summary;
};

ComparisonReport compare_rows(const std::vector<SweepRow>& rows, double z_tolerance = 3.0);

/// Recomputes the summary from report.rows alone.
ComparisonSummary summarize(const std::vector<ComparisonRow>& rows, int skipped,
                            double z_tolerance);

void write_report(std::ostream& out, const ComparisonReport& report);
void write_summary_line(std::ostream& out, const ComparisonSummary& s);

}  // namespace prunelab::harness
