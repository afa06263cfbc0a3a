#include "fedsim/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>

#include "fedsim/dataset.hpp"
#include "fedsim/errors.hpp"
#include "fedsim/logistic.hpp"
#include "fedsim/parallel.hpp"
#include "fedsim/quadratic.hpp"

namespace fedsim {

using nlohmann::json;

AlgorithmConfig AlgorithmSpec::to_config() const {
    AlgorithmConfig cfg;
    cfg.variant = parse_variant(variant);
    cfg.local_lr = eta_l;
    cfg.global_lr = eta_g;
    cfg.local_steps = local_steps;
    cfg.prox_mu = prox_mu;
    cfg.control_init = parse_control_init(control_init);
    return cfg;
}

TargetSpec TargetConfig::to_target() const {
    TargetSpec t;
    if (metric == "suboptimality") t.metric = TargetSpec::Metric::Suboptimality;
    else if (metric == "grad_norm_sq") t.metric = TargetSpec::Metric::GradNormSq;
    else if (metric == "accuracy") t.metric = TargetSpec::Metric::Accuracy;
    else throw ConfigError("target.metric", "unknown metric '" + metric + "'");
    t.threshold = threshold;
    t.stop_early = stop_early;
    return t;
}

OutputSelector OutputConfig::to_selector() const {
    OutputSelector s;
    if (mode == "last_iterate") s.mode = OutputSelector::Mode::LastIterate;
    else if (mode == "weighted") s.mode = OutputSelector::Mode::Weighted;
    else throw ConfigError("output.mode", "unknown mode '" + mode + "'");
    s.mu = mu;
    return s;
}

// ---------------------------------------------------------------------------
// JSON round trip
// ---------------------------------------------------------------------------

static void to_json(json& j, const ObjectiveSpec& o) {
    j = json{{"kind", o.kind},
             {"mu", o.mu},
             {"G", o.G},
             {"delta", o.delta},
             {"mu_min", o.mu_min},
             {"sigma_sq", o.sigma_sq},
             {"dim", o.dim},
             {"n", o.n},
             {"classes", o.classes},
             {"similarity", o.similarity},
             {"l2", o.l2},
             {"batch_fraction", o.batch_fraction},
             {"seed", o.seed},
             {"csv_path", o.csv_path}};
}

static void from_json(const json& j, ObjectiveSpec& o) {
    const ObjectiveSpec defaults;
    o.kind = j.value("kind", defaults.kind);
    o.mu = j.value("mu", defaults.mu);
    o.G = j.value("G", defaults.G);
    o.delta = j.value("delta", defaults.delta);
    o.mu_min = j.value("mu_min", defaults.mu_min);
    o.sigma_sq = j.value("sigma_sq", defaults.sigma_sq);
    o.dim = j.value("dim", defaults.dim);
    o.n = j.value("n", defaults.n);
    o.classes = j.value("classes", defaults.classes);
    o.similarity = j.value("similarity", defaults.similarity);
    o.l2 = j.value("l2", defaults.l2);
    o.batch_fraction = j.value("batch_fraction", defaults.batch_fraction);
    o.seed = j.value("seed", defaults.seed);
    o.csv_path = j.value("csv_path", defaults.csv_path);
}

static void to_json(json& j, const AlgorithmSpec& a) {
    j = json{{"variant", a.variant},   {"eta_l", a.eta_l},
             {"eta_g", a.eta_g},       {"local_steps", a.local_steps},
             {"prox_mu", a.prox_mu},   {"control_init", a.control_init}};
}

static void from_json(const json& j, AlgorithmSpec& a) {
    const AlgorithmSpec defaults;
    a.variant = j.value("variant", defaults.variant);
    a.eta_l = j.value("eta_l", defaults.eta_l);
    a.eta_g = j.value("eta_g", defaults.eta_g);
    a.local_steps = j.value("local_steps", defaults.local_steps);
    a.prox_mu = j.value("prox_mu", defaults.prox_mu);
    a.control_init = j.value("control_init", defaults.control_init);
}

static void to_json(json& j, const TargetConfig& t) {
    j = json{{"metric", t.metric}, {"threshold", t.threshold}, {"stop_early", t.stop_early}};
}

static void from_json(const json& j, TargetConfig& t) {
    const TargetConfig defaults;
    t.metric = j.value("metric", defaults.metric);
    t.threshold = j.value("threshold", defaults.threshold);
    t.stop_early = j.value("stop_early", defaults.stop_early);
}

static void to_json(json& j, const OutputConfig& o) {
    j = json{{"mode", o.mode}, {"mu", o.mu}};
}

static void from_json(const json& j, OutputConfig& o) {
    const OutputConfig defaults;
    o.mode = j.value("mode", defaults.mode);
    o.mu = j.value("mu", defaults.mu);
}

std::string serialize_spec(const ExperimentSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["objective"] = spec.objective;
    j["algorithm"] = spec.algorithm;
    j["num_clients"] = spec.num_clients;
    j["sample_size"] = spec.sample_size;
    j["rounds"] = spec.rounds;
    j["seeds"] = spec.seeds;
    j["init_value"] = spec.init_value;
    j["output"] = spec.output;
    if (spec.target) j["target"] = *spec.target;
    j["out_dir"] = spec.out_dir;
    j["workers"] = spec.workers;
    return j.dump(2) + "\n";
}

ExperimentSpec parse_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
    ExperimentSpec spec;
    try {
        spec.name = j.value("name", spec.name);
        if (j.contains("objective")) spec.objective = j.at("objective").get<ObjectiveSpec>();
        if (j.contains("algorithm")) spec.algorithm = j.at("algorithm").get<AlgorithmSpec>();
        spec.num_clients = j.value("num_clients", spec.num_clients);
        spec.sample_size = j.value("sample_size", spec.sample_size);
        spec.rounds = j.value("rounds", spec.rounds);
        spec.seeds = j.value("seeds", spec.seeds);
        spec.init_value = j.value("init_value", spec.init_value);
        if (j.contains("output")) spec.output = j.at("output").get<OutputConfig>();
        if (j.contains("target")) spec.target = j.at("target").get<TargetConfig>();
        spec.out_dir = j.value("out_dir", spec.out_dir);
        spec.workers = j.value("workers", spec.workers);
    } catch (const json::exception& e) {
        throw ConfigError("<root>", std::string("bad field type: ") + e.what());
    }
    return spec;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_spec: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ExperimentSpec spec = parse_spec(text);
    if (const char* out = std::getenv("FEDSIM_OUT_DIR"); out != nullptr && *out != '\0') {
        spec.out_dir = out;
    }
    validate_spec(spec);
    return spec;
}

// ---------------------------------------------------------------------------
// Validation and family construction
// ---------------------------------------------------------------------------

namespace {

bool is_quadratic_kind(const std::string& kind) {
    return kind == "lower-bound-pair" || kind == "quadratic-ensemble";
}

bool is_classification_kind(const std::string& kind) {
    return kind == "synthetic-classification" || kind == "csv-dataset";
}

}  // namespace

void validate_spec(const ExperimentSpec& spec) {
    if (spec.name.empty()) throw ConfigError("name", "must be nonempty");
    if (spec.rounds < 1) throw ConfigError("rounds", "must be >= 1");
    if (spec.num_clients < 1) throw ConfigError("num_clients", "must be >= 1");
    if (spec.sample_size < 1 || spec.sample_size > spec.num_clients)
        throw ConfigError("sample_size", "need 1 <= S <= num_clients");
    if (spec.seeds.empty()) throw ConfigError("seeds", "must be nonempty");
    if (!std::isfinite(spec.init_value)) throw ConfigError("init_value", "must be finite");
    if (spec.workers < 1) throw ConfigError("workers", "must be >= 1");

    AlgorithmConfig cfg;
    try {
        cfg = spec.algorithm.to_config();
        cfg.validate();
    } catch (const ParameterError& e) {
        throw ConfigError("algorithm", e.what());
    }

    const auto& o = spec.objective;
    if (o.kind == "lower-bound-pair") {
        if (o.mu <= 0.0) throw ConfigError("objective.mu", "must be positive");
        if (o.G <= 0.0) throw ConfigError("objective.G", "must be positive");
        if (spec.num_clients != 2)
            throw ConfigError("num_clients", "lower-bound-pair defines exactly 2 clients");
    } else if (o.kind == "quadratic-ensemble") {
        if (spec.num_clients < 2) throw ConfigError("num_clients", "ensemble needs N >= 2");
        if (o.dim < 1) throw ConfigError("objective.dim", "must be >= 1");
        if (o.delta < 0.0 || o.delta > 2.0)
            throw ConfigError("objective.delta", "must lie in [0, 2]");
        if (o.G < 0.0) throw ConfigError("objective.G", "must be >= 0");
        if (o.mu_min <= 0.0 || o.mu_min > 1.0)
            throw ConfigError("objective.mu_min", "must lie in (0, 1]");
    } else if (is_classification_kind(o.kind)) {
        if (o.kind == "synthetic-classification") {
            if (o.classes < 2) throw ConfigError("objective.classes", "must be >= 2");
            if (o.dim < 2) throw ConfigError("objective.dim", "must be >= 2");
            if (o.n < std::max(o.classes, spec.num_clients))
                throw ConfigError("objective.n", "need n >= max(classes, num_clients)");
        } else if (o.csv_path.empty()) {
            throw ConfigError("objective.csv_path", "must be set for csv-dataset");
        }
        if (o.similarity < 0.0 || o.similarity > 100.0)
            throw ConfigError("objective.similarity", "must lie in [0, 100]");
        if (o.l2 < 0.0) throw ConfigError("objective.l2", "must be >= 0");
        if (o.batch_fraction <= 0.0 || o.batch_fraction > 1.0)
            throw ConfigError("objective.batch_fraction", "must lie in (0, 1]");
    } else {
        throw ConfigError("objective.kind", "unknown kind '" + o.kind + "'");
    }
    if (o.sigma_sq < 0.0) throw ConfigError("objective.sigma_sq", "must be >= 0");

    spec.output.to_selector();
    if (spec.output.mode == "weighted") {
        if (spec.output.mu < 0.0) throw ConfigError("output.mu", "must be >= 0");
        if (0.5 * spec.output.mu * cfg.effective_step() >= 1.0)
            throw ConfigError("output.mu", "needs mu*eta_tilde/2 < 1");
    }

    if (spec.target) {
        const TargetSpec t = spec.target->to_target();
        if (t.metric == TargetSpec::Metric::Suboptimality && !is_quadratic_kind(o.kind))
            throw ConfigError("target.metric",
                              "suboptimality targets need an analytic optimum (quadratic kinds)");
        if (t.metric == TargetSpec::Metric::Accuracy && !is_classification_kind(o.kind))
            throw ConfigError("target.metric", "accuracy targets need a classification objective");
    }
}

ObjectiveFamily build_family(const ExperimentSpec& spec, std::uint64_t run_seed) {
    const auto& o = spec.objective;
    const std::uint64_t base = mix_seed(o.seed, run_seed);
    if (o.kind == "lower-bound-pair") {
        return quadratic_family(make_lower_bound_clients(o.mu, o.G, o.sigma_sq));
    }
    if (o.kind == "quadratic-ensemble") {
        EnsembleOptions opts;
        opts.mu_min = o.mu_min;
        opts.sigma_sq = o.sigma_sq;
        return quadratic_family(
            make_quadratic_ensemble(spec.num_clients, o.dim, o.delta, o.G, base, opts));
    }
    LogisticConfig lcfg;
    lcfg.l2 = o.l2;
    lcfg.batch_fraction = o.batch_fraction;
    std::shared_ptr<const Dataset> data;
    if (o.kind == "synthetic-classification") {
        data = std::make_shared<Dataset>(
            make_synthetic_classification(o.n, o.dim, o.classes, mix_seed(base, 0xDA7A)));
    } else if (o.kind == "csv-dataset") {
        data = std::make_shared<Dataset>(load_csv_dataset(o.csv_path));
    } else {
        throw ConfigError("objective.kind", "unknown kind '" + o.kind + "'");
    }
    return split_by_similarity(data, o.similarity, spec.num_clients, mix_seed(base, 0x5417), lcfg);
}

// ---------------------------------------------------------------------------
// Result rows
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string> kRowHeader = {
    "name", "objective", "variant", "control_init", "eta_l", "eta_g", "local_steps",
    "prox_mu", "num_clients", "sample_size", "rounds", "init_value", "output_mode",
    "output_mu", "target_metric", "target_threshold", "obj_dim", "obj_n", "obj_classes",
    "obj_mu", "obj_G", "obj_delta", "obj_mu_min", "obj_sigma_sq", "obj_similarity",
    "obj_l2", "obj_batch_fraction", "obj_seed", "seed", "rounds_run", "rounds_to_target",
    "diverged", "final_suboptimality", "final_grad_norm_sq", "final_accuracy",
    "final_drift", "final_control_lag", "total_comm_bytes", "total_grad_evals"};

std::vector<std::string> flatten_row(const ResultRow& r) {
    const auto& s = r.spec;
    std::vector<std::string> cells;
    cells.reserve(kRowHeader.size());
    cells.push_back(s.name);
    cells.push_back(s.objective.kind);
    cells.push_back(s.algorithm.variant);
    cells.push_back(s.algorithm.control_init);
    cells.push_back(format_double(s.algorithm.eta_l));
    cells.push_back(format_double(s.algorithm.eta_g));
    cells.push_back(std::to_string(s.algorithm.local_steps));
    cells.push_back(format_double(s.algorithm.prox_mu));
    cells.push_back(std::to_string(s.num_clients));
    cells.push_back(std::to_string(s.sample_size));
    cells.push_back(std::to_string(s.rounds));
    cells.push_back(format_double(s.init_value));
    cells.push_back(s.output.mode);
    cells.push_back(format_double(s.output.mu));
    cells.push_back(s.target ? s.target->metric : "none");
    cells.push_back(format_double(s.target ? s.target->threshold : 0.0));
    cells.push_back(std::to_string(s.objective.dim));
    cells.push_back(std::to_string(s.objective.n));
    cells.push_back(std::to_string(s.objective.classes));
    cells.push_back(format_double(s.objective.mu));
    cells.push_back(format_double(s.objective.G));
    cells.push_back(format_double(s.objective.delta));
    cells.push_back(format_double(s.objective.mu_min));
    cells.push_back(format_double(s.objective.sigma_sq));
    cells.push_back(format_double(s.objective.similarity));
    cells.push_back(format_double(s.objective.l2));
    cells.push_back(format_double(s.objective.batch_fraction));
    cells.push_back(std::to_string(s.objective.seed));
    cells.push_back(std::to_string(r.seed));
    cells.push_back(std::to_string(r.rounds_run));
    cells.push_back(std::to_string(r.rounds_to_target));
    cells.push_back(r.diverged ? "1" : "0");
    cells.push_back(format_double(r.final_suboptimality));
    cells.push_back(format_double(r.final_grad_norm_sq));
    cells.push_back(format_double(r.final_accuracy));
    cells.push_back(format_double(r.final_drift));
    cells.push_back(format_double(r.final_control_lag));
    cells.push_back(std::to_string(r.total_comm_bytes));
    cells.push_back(std::to_string(r.total_grad_evals));
    return cells;
}

std::string sanitize_filename(const std::string& name) {
    std::string out = name;
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '_';
        if (!ok) c = '_';
    }
    return out;
}

void write_trace(const ExperimentTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_trace: cannot open " + path);
    out << "round,suboptimality,grad_norm_sq,drift,control_lag,comm_bytes,grad_evals\n";
    for (const auto& m : trace.rounds) {
        out << m.round << ',' << format_double(m.suboptimality) << ','
            << format_double(m.grad_norm_sq) << ',' << format_double(m.drift) << ','
            << format_double(m.control_lag) << ',' << m.comm_bytes << ',' << m.grad_evals
            << '\n';
    }
}

}  // namespace

CsvTable rows_to_table(const std::vector<ResultRow>& rows) {
    CsvTable table;
    table.header = kRowHeader;
    table.rows.reserve(rows.size());
    for (const auto& r : rows) table.rows.push_back(flatten_row(r));
    return table;
}

std::vector<ResultRow> run_single(const ExperimentSpec& spec, const RunOptions& opts) {
    validate_spec(spec);
    const AlgorithmConfig cfg = spec.algorithm.to_config();
    const OutputSelector selector = spec.output.to_selector();
    std::optional<TargetSpec> target;
    if (spec.target) target = spec.target->to_target();

    std::vector<ResultRow> rows;
    rows.reserve(spec.seeds.size());
    for (const std::uint64_t seed : spec.seeds) {
        const ObjectiveFamily family = build_family(spec, seed);
        if (static_cast<int>(family.num_clients()) != spec.num_clients)
            throw ConfigError("num_clients", "objective produced a different client count");
        const SamplingPlan plan{spec.num_clients, spec.sample_size, seed};
        const Vec x0 = constant(family.dim(), spec.init_value);
        const ExperimentTrace trace = run_experiment(family, cfg, spec.rounds, plan, selector,
                                                     target, x0, spec.workers);

        ResultRow row;
        row.spec = spec;
        row.seed = seed;
        row.rounds_run = static_cast<int>(trace.rounds.size()) - 1;
        row.rounds_to_target = trace.rounds_to_target.value_or(-1);
        row.diverged = trace.diverged;
        const RoundMetrics& last = trace.rounds.back();
        row.final_suboptimality = last.suboptimality;
        row.final_grad_norm_sq = last.grad_norm_sq;
        row.final_accuracy = last.accuracy;
        row.final_drift = last.drift;
        row.final_control_lag = last.control_lag;
        for (const auto& m : trace.rounds) {
            row.total_comm_bytes += m.comm_bytes;
            row.total_grad_evals += m.grad_evals;
        }
        rows.push_back(std::move(row));

        if (opts.write_files) {
            std::filesystem::create_directories(spec.out_dir);
            const std::string stem = sanitize_filename(spec.name);
            write_trace(trace, spec.out_dir + "/" + stem + "_seed" + std::to_string(seed) +
                                   "_trace.csv");
        }
    }
    if (opts.write_files) {
        std::filesystem::create_directories(spec.out_dir);
        save_csv_table(rows_to_table(rows),
                       spec.out_dir + "/" + sanitize_filename(spec.name) + "_rows.csv");
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Grid execution
// ---------------------------------------------------------------------------

namespace {

double parse_double_value(const std::string& param, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("axis." + param, "cannot parse '" + value + "' as a number");
    }
}

int parse_int_value(const std::string& param, const std::string& value) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("axis." + param, "cannot parse '" + value + "' as an integer");
    }
}

}  // namespace

void apply_axis_value(ExperimentSpec& spec, const std::string& param, const std::string& value) {
    if (param == "eta_l") spec.algorithm.eta_l = parse_double_value(param, value);
    else if (param == "eta_g") spec.algorithm.eta_g = parse_double_value(param, value);
    else if (param == "prox_mu") spec.algorithm.prox_mu = parse_double_value(param, value);
    else if (param == "K" || param == "local_steps")
        spec.algorithm.local_steps = parse_int_value(param, value);
    else if (param == "variant") spec.algorithm.variant = value;
    else if (param == "control_init") spec.algorithm.control_init = value;
    else if (param == "R" || param == "rounds") spec.rounds = parse_int_value(param, value);
    else if (param == "S" || param == "sample_size")
        spec.sample_size = parse_int_value(param, value);
    else if (param == "N" || param == "num_clients")
        spec.num_clients = parse_int_value(param, value);
    else if (param == "G") spec.objective.G = parse_double_value(param, value);
    else if (param == "delta") spec.objective.delta = parse_double_value(param, value);
    else if (param == "mu") spec.objective.mu = parse_double_value(param, value);
    else if (param == "mu_min") spec.objective.mu_min = parse_double_value(param, value);
    else if (param == "sigma_sq") spec.objective.sigma_sq = parse_double_value(param, value);
    else if (param == "similarity") spec.objective.similarity = parse_double_value(param, value);
    else if (param == "l2") spec.objective.l2 = parse_double_value(param, value);
    else if (param == "batch_fraction")
        spec.objective.batch_fraction = parse_double_value(param, value);
    else if (param == "dim") spec.objective.dim = parse_int_value(param, value);
    else if (param == "n") spec.objective.n = parse_int_value(param, value);
    else if (param == "classes") spec.objective.classes = parse_int_value(param, value);
    else if (param == "init_value") spec.init_value = parse_double_value(param, value);
    else throw ConfigError("axis." + param, "unknown grid parameter");
}

std::vector<ResultRow> run_grid(const ExperimentSpec& base, const std::vector<GridAxis>& axes,
                                const RunOptions& opts) {
    validate_spec(base);
    for (const auto& axis : axes) {
        if (axis.values.empty())
            throw ConfigError("axis." + axis.param, "axis has no values");
    }

    // Materialize the Cartesian product in axis-major order.
    std::vector<ExperimentSpec> cells{base};
    for (const auto& axis : axes) {
        std::vector<ExperimentSpec> next;
        next.reserve(cells.size() * axis.values.size());
        for (const auto& cell : cells) {
            for (const auto& value : axis.values) {
                ExperimentSpec s = cell;
                apply_axis_value(s, axis.param, value);
                s.name = cell.name + "__" + axis.param + "_" + value;
                next.push_back(std::move(s));
            }
        }
        cells = std::move(next);
    }
    for (const auto& cell : cells) validate_spec(cell);

    const std::size_t per_cell = base.seeds.size();
    std::vector<ResultRow> rows(cells.size() * per_cell);
    parallel_for(static_cast<int>(cells.size()), opts.workers, [&](int i) {
        RunOptions cell_opts = opts;
        cell_opts.workers = 1;
        // Parallelism lives at the cell level here; keep each cell's own
        // round loop single-threaded to avoid oversubscription.
        ExperimentSpec cell = cells[static_cast<std::size_t>(i)];
        if (opts.workers > 1) cell.workers = 1;
        auto cell_rows = run_single(cell, cell_opts);
        std::copy(cell_rows.begin(), cell_rows.end(),
                  rows.begin() + static_cast<std::ptrdiff_t>(i * per_cell));
    });

    if (opts.write_files) {
        std::filesystem::create_directories(base.out_dir);
        save_csv_table(rows_to_table(rows),
                       base.out_dir + "/" + sanitize_filename(base.name) + "_grid_rows.csv");
    }
    return rows;
}

std::vector<double> default_eta_grid() {
    std::vector<double> grid;
    for (int p = -10; p <= 0; ++p) grid.push_back(std::ldexp(1.0, p));
    return grid;
}

std::optional<double> best_eta_l(const std::vector<ResultRow>& rows, const std::string& metric) {
    if (metric != "rounds_to_target" && metric != "final_suboptimality")
        throw ConfigError("metric", "best_eta_l supports rounds_to_target or final_suboptimality");
    std::map<double, std::vector<double>> by_eta;
    for (const auto& r : rows) {
        if (r.diverged) continue;
        double v = 0.0;
        if (metric == "rounds_to_target") {
            // Unreached targets rank below everything that reached it.
            v = r.rounds_to_target >= 0 ? static_cast<double>(r.rounds_to_target)
                                        : static_cast<double>(r.spec.rounds + 1);
        } else {
            v = r.final_suboptimality;
        }
        if (std::isnan(v)) continue;
        by_eta[r.spec.algorithm.eta_l].push_back(v);
    }
    std::optional<double> best;
    double best_metric = 0.0;
    for (const auto& [eta, values] : by_eta) {
        const double m = median(values);
        if (!best || m < best_metric) {
            best = eta;
            best_metric = m;
        }
    }
    return best;
}

}  // namespace fedsim
