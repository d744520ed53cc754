#pragma once

// Grids of experiment cells. Each cell gets a theory prediction and,
// optionally, a Monte Carlo estimate from run_cell.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "prunelab/harness/config.hpp"
#include "prunelab/simulate.hpp"

namespace prunelab::harness {

// Recognized axis names. `p` and `ratio` (pool over kept, i.e. 1/p) set the
// threshold of kh / ke strategies; `kept` sets n = round(kept / p) and is
// applied last.
inline constexpr const char* kAxisNames[] = {"strategy", "xi", "exponent", "p", "ratio",
                                             "n", "d", "lambda", "rho", "kept"};

bool is_axis_name(std::string_view name);

struct SweepAxis {
    std::string name;
    std::vector<std::string> values;

    friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct SweepSpec {
    std::string name = "sweep";
    ExperimentConfig base;
    std::vector<SweepAxis> axes;
    bool empirics = false;
    std::string csv_path = "sweep.csv";
    std::string svg_path;  // empty: no plot
    int workers = 1;

    void validate() const;
    long cell_count() const;

    friend bool operator==(const SweepSpec& a, const SweepSpec& b);
};

SweepSpec sweep_from_config(const ConfigDocument& doc);
ConfigDocument sweep_to_config(const SweepSpec& spec);

SweepSpec parse_sweep(std::string_view text);
std::string serialize_sweep(const SweepSpec& spec);

/// Experiment configuration of cell `index` (row-major over the axes, last
/// axis fastest), including the derived cell seed.
ExperimentConfig cell_config(const SweepSpec& spec, long index);

inline constexpr int kSchemaVersion = 1;

struct SweepRow {
    int schema_version = kSchemaVersion;
    long cell_id = 0;
    std::string strategy;
    std::optional<double> xi;
    std::optional<double> exponent;
    int d = 0;
    int n = 0;
    double phi = 0.0;
    double p = 0.0;
    double lambda = 0.0;
    double rho = 0.0;
    std::optional<double> gamma;
    std::optional<double> beta;
    std::optional<double> beta_tilde;
    std::optional<double> m;
    std::optional<double> m_prime;
    std::optional<double> m_tilde;
    std::optional<double> m0;
    std::optional<double> nu0;
    std::optional<double> theory_error;
    std::optional<double> empirical_mean;
    std::optional<double> empirical_std;
    std::optional<int> trials;
    std::uint64_t seed = 0;
    std::string error_code = "ok";

    friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Theory (and empirics when requested) for one configuration. Never throws
/// for numerical failures; they become error codes.
SweepRow evaluate_cell(const ExperimentConfig& config, long cell_id, bool empirics);

/// Rows in cell order; the result does not depend on spec.workers.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Named grids: theory-scaling, figcool, figcool-small, oversample-curve.
std::vector<std::string> preset_names();
SweepSpec preset(std::string_view name);

}  // namespace prunelab::harness
