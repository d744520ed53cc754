#pragma once

// Self-contained SVG line charts from sweep-style CSV tables.

#include <string>

#include "prunelab/harness/csv.hpp"

namespace prunelab::harness {

struct PlotSpec {
    std::string x = "n";
    std::string y = "theory_error";
    // Comma-separated columns; one line per distinct combination. Empty: a
    // single line.
    std::string series = "p";
    std::string overlay;       // optional column drawn as markers only
    bool log_x = false;
    bool log_y = false;
    bool accuracy = false;  // plot 1 - y (and 1 - overlay)
    std::string title;
};

/// Throws InvalidArgument listing every missing column by name.
std::string emit_plot(const Table& table, const PlotSpec& spec);

/// Plot layout matching a sweep's axes (used for presets and `sweep --svg`).
PlotSpec default_plot(const SweepSpec& spec);

}  // namespace prunelab::harness
