#include "prunelab/harness/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace prunelab::harness {

ComparisonSummary summarize(const std::vector<ComparisonRow>& rows, int skipped,
                            double z_tolerance) {
    ComparisonSummary s;
    s.cells = static_cast<int>(rows.size());
    s.skipped = skipped;
    s.z_tolerance = z_tolerance;
    int within = 0;
    for (const auto& r : rows) {
        s.max_abs_deviation = std::max(s.max_abs_deviation, r.abs_deviation);
        if (std::abs(r.z_score) <= z_tolerance) ++within;
    }
    s.fraction_within = rows.empty() ? 0.0 : static_cast<double>(within) / rows.size();
    return s;
}

ComparisonReport compare_rows(const std::vector<SweepRow>& rows, double z_tolerance) {
    ComparisonReport rep;
    int skipped = 0;
    for (const auto& r : rows) {
        if (!r.theory_error || !r.empirical_mean || !r.empirical_std || !r.trials || *r.trials < 1) {
            ++skipped;
            continue;
        }
        ComparisonRow c;
        c.cell_id = r.cell_id;
        c.theory_error = *r.theory_error;
        c.empirical_mean = *r.empirical_mean;
        c.empirical_std = *r.empirical_std;
        c.trials = *r.trials;
        const double diff = c.empirical_mean - c.theory_error;
        c.abs_deviation = std::abs(diff);
        const double se = c.empirical_std / std::sqrt(static_cast<double>(c.trials));
        if (se > 0.0)
            c.z_score = diff / se;
        else
            c.z_score = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
        rep.rows.push_back(c);
    }
    rep.summary = summarize(rep.rows, skipped, z_tolerance);
    return rep;
}

void write_summary_line(std::ostream& out, const ComparisonSummary& s) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "cells=%d skipped=%d max_abs_deviation=%.6f fraction_within_%gse=%.4f\n", s.cells,
                  s.skipped, s.max_abs_deviation, s.z_tolerance, s.fraction_within);
    out << buf;
}

void write_report(std::ostream& out, const ComparisonReport& report) {
    out << "cell_id,theory_error,empirical_mean,empirical_std,trials,abs_deviation,z_score\n";
    for (const auto& r : report.rows) {
        out << r.cell_id << ',' << format_real(r.theory_error) << ',' << format_real(r.empirical_mean)
            << ',' << format_real(r.empirical_std) << ',' << r.trials << ','
            << format_real(r.abs_deviation) << ',' << format_real(r.z_score) << '\n';
    }
}

}  // namespace prunelab::harness
