#pragma once

// Experiment specs (JSON-serializable), the single-run and grid runners, and
// flattened result rows. One spec plus its seed list fully determines every
// output file byte-for-byte.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fedsim/objective.hpp"
#include "fedsim/orchestrator.hpp"
#include "fedsim/report.hpp"

namespace fedsim {

struct ObjectiveSpec {
    // "lower-bound-pair" | "quadratic-ensemble" | "synthetic-classification"
    // | "csv-dataset"
    std::string kind = "lower-bound-pair";
    double mu = 1.0;         // lower-bound-pair strong convexity
    double G = 1.0;          // gradient-heterogeneity target
    double delta = 1.0;      // Hessian-heterogeneity target (ensemble)
    double mu_min = 0.1;     // smallest mean-Hessian eigenvalue (ensemble)
    double sigma_sq = 0.0;   // additive gradient-noise bound (quadratics)
    int dim = 1;             // feature/model dimension (ensemble, synthetic)
    int n = 1000;            // sample count (synthetic)
    int classes = 10;        // class count (synthetic)
    double similarity = 100.0;  // s% of the similarity split
    double l2 = 0.0;            // logistic ridge
    double batch_fraction = 0.2;
    std::uint64_t seed = 0;  // construction seed, mixed with the run seed
    std::string csv_path;    // csv-dataset source

    bool operator==(const ObjectiveSpec&) const = default;
};

struct AlgorithmSpec {
    std::string variant = "fedavg";
    double eta_l = 0.1;
    double eta_g = 1.0;
    int local_steps = 1;
    double prox_mu = 0.0;
    std::string control_init = "zeros";

    bool operator==(const AlgorithmSpec&) const = default;
    AlgorithmConfig to_config() const;
};

struct TargetConfig {
    std::string metric = "suboptimality";  // | "grad_norm_sq" | "accuracy"
    double threshold = 0.0;
    bool stop_early = true;

    bool operator==(const TargetConfig&) const = default;
    TargetSpec to_target() const;
};

struct OutputConfig {
    std::string mode = "last_iterate";  // | "weighted"
    double mu = 0.0;

    bool operator==(const OutputConfig&) const = default;
    OutputSelector to_selector() const;
};

struct ExperimentSpec {
    std::string name = "experiment";
    ObjectiveSpec objective;
    AlgorithmSpec algorithm;
    int num_clients = 2;
    int sample_size = 2;
    int rounds = 100;
    std::vector<std::uint64_t> seeds = {1};
    double init_value = 0.0;  // x0 is a constant fill
    OutputConfig output;
    std::optional<TargetConfig> target;
    std::string out_dir = "results";
    int workers = 1;

    bool operator==(const ExperimentSpec&) const = default;
};

/// Throws ConfigError (naming the field) on any invalid or inconsistent field.
void validate_spec(const ExperimentSpec& spec);

std::string serialize_spec(const ExperimentSpec& spec);
ExperimentSpec parse_spec(const std::string& json_text);

/// Reads and validates a spec file. FEDSIM_OUT_DIR, when set, overrides the
/// output directory (environment overrides touch paths only).
ExperimentSpec load_spec(const std::string& path);

/// Instantiates the client family for one run. The run seed perturbs data
/// generation and splits, so seed lists average over problem draws too.
ObjectiveFamily build_family(const ExperimentSpec& spec, std::uint64_t run_seed);

struct ResultRow {
    ExperimentSpec spec;  // the cell's spec (name carries axis values)
    std::uint64_t seed = 0;
    int rounds_run = 0;
    int rounds_to_target = -1;  // -1: target absent or never reached
    bool diverged = false;
    double final_suboptimality = 0.0;
    double final_grad_norm_sq = 0.0;
    double final_accuracy = 0.0;
    double final_drift = 0.0;
    double final_control_lag = 0.0;
    long total_comm_bytes = 0;
    long total_grad_evals = 0;
};

/// Fixed flattened schema shared by rows.csv and the table verb.
CsvTable rows_to_table(const std::vector<ResultRow>& rows);

struct RunOptions {
    bool write_files = true;
    int workers = 1;  // worker threads (grid: across cells)
};

/// One row per seed. Writes <name>_seed<seed>_trace.csv per seed and
/// <name>_rows.csv under spec.out_dir when write_files is set.
std::vector<ResultRow> run_single(const ExperimentSpec& spec, const RunOptions& opts = {});

struct GridAxis {
    std::string param;                // e.g. "eta_l", "K", "variant"
    std::vector<std::string> values;  // parsed per the parameter's type
};

/// Applies one axis value to a spec copy; ConfigError on unknown parameters.
void apply_axis_value(ExperimentSpec& spec, const std::string& param, const std::string& value);

/// Cartesian product of the axes, each cell executed as run_single. Cells
/// may run concurrently (opts.workers); row order stays cell-major.
std::vector<ResultRow> run_grid(const ExperimentSpec& base, const std::vector<GridAxis>& axes,
                                const RunOptions& opts = {});

/// Default local step-size tuning grid: powers of two in [2^-10, 2^0].
std::vector<double> default_eta_grid();

/// Best eta_l among rows that differ only in eta_l and seed: smallest median
/// metric over non-diverged seeds ("rounds_to_target" counts unreached runs
/// as rounds+1; "final_suboptimality" uses the value as-is). Empty when every
/// candidate diverged on all seeds.
std::optional<double> best_eta_l(const std::vector<ResultRow>& rows, const std::string& metric);

}  // namespace fedsim
