#pragma once

#include <string>
#include <vector>

#include "ltb/classify.hpp"
#include "ltb/model.hpp"

namespace ltb {

enum class Spacing { Linear, Logarithmic };

/// Deterministic (n, a) grid, inclusive of both a endpoints.
struct SweepGrid {
    std::vector<int> n_values;
    double a_min = 0.1;
    double a_max = 5.0;
    int a_steps = 50;
    Spacing spacing = Spacing::Logarithmic;
};

/// Expanded a values of a grid.
std::vector<double> expand_grid(const SweepGrid& grid);

struct SweepSettings {
    double r_max = 0.1;
    std::vector<GammaTerm> gamma;
    ClassifySettings classify;
    /// 0 = hardware concurrency; overridden by the LTBLAB_WORKERS env var.
    unsigned workers = 0;
};

struct SweepRow {
    int n = 0;
    double a = 0.0;
    bool failed = false;
    std::string error;  // captured per-point failure, never aborts the sweep
    ClassificationReport report;
    double wall_ms = 0.0;
};

struct Provenance {
    std::string tool_version;
    double rel_tol = 0.0;
    double abs_tol = 0.0;
    double probe_margin = 0.0;
    double probe_depth = 0.0;
    double probe_r_floor = 0.0;
    double start_epsilon = 0.0;
    std::string timestamp;  // ISO 8601 UTC; the only non-deterministic field
};

/// Rows are ordered by grid position regardless of how many workers ran.
struct SweepResult {
    SweepGrid grid;
    std::vector<SweepRow> rows;
    Provenance provenance;
};

/// Classifies every grid point with a bounded worker pool. Per-point
/// failures are captured in the row. Output order equals grid order.
SweepResult run_sweep(const SweepGrid& grid, const SweepSettings& settings = {});

/// CSV with columns n,a,analytic,rule,numeric,agree,x0,alpha,termination,r_escape.
/// Byte-stable for identical inputs and tool version (no timestamp).
std::string sweep_to_csv(const SweepResult& result);

/// Full JSON mirror of the reports, including provenance.
std::string sweep_to_json(const SweepResult& result);

/// Parses the JSON emitted by sweep_to_json back into a SweepResult.
SweepResult sweep_from_json(const std::string& text);

/// Model configuration file: JSON object with exactly the keys
/// n (int), a (real), gamma (array of [power, coeff] pairs), r_max (real).
/// Unknown keys are rejected; ModelParams invariants are enforced.
ModelParams load_model_config(const std::string& path);

/// Same schema from an in-memory JSON string.
ModelParams model_params_from_json_text(const std::string& text);

}  // namespace ltb
