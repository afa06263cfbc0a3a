// fedsim command-line runner: single experiments, grid sweeps, and result
// tables. Exit codes: 0 success, 2 config error, 3 every run diverged.

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "fedsim/errors.hpp"
#include "fedsim/experiment.hpp"
#include "fedsim/report.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

fedsim::GridAxis parse_axis(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= arg.size()) {
        throw fedsim::ConfigError("axis", "expected PARAM=v1,v2,... got '" + arg + "'");
    }
    fedsim::GridAxis axis;
    axis.param = arg.substr(0, eq);
    axis.values = split_list(arg.substr(eq + 1));
    if (axis.values.empty()) throw fedsim::ConfigError("axis." + axis.param, "no values");
    return axis;
}

void apply_overrides(fedsim::ExperimentSpec& spec, const std::string& out_dir,
                     const std::string& seeds_csv) {
    if (!out_dir.empty()) spec.out_dir = out_dir;
    if (!seeds_csv.empty()) {
        spec.seeds.clear();
        for (const auto& s : split_list(seeds_csv)) {
            try {
                spec.seeds.push_back(std::stoull(s));
            } catch (const std::exception&) {
                throw fedsim::ConfigError("seeds", "cannot parse seed '" + s + "'");
            }
        }
        fedsim::validate_spec(spec);
    }
}

int report_rows(const std::vector<fedsim::ResultRow>& rows) {
    std::size_t diverged = 0;
    for (const auto& r : rows) diverged += r.diverged ? 1 : 0;
    std::cout << rows.size() << " run(s), " << diverged << " diverged\n";
    return (diverged == rows.size() && !rows.empty()) ? kExitDiverged : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fedsim: federated optimization experiment runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir, seeds_csv, rows_path, group_by_csv, metric, table_out;
    std::vector<std::string> axis_args;
    int workers = 1;

    CLI::App* cmd_run = app.add_subcommand("run", "run a single experiment config");
    cmd_run->add_option("--config", config_path, "spec JSON path")->required();
    cmd_run->add_option("--out", out_dir, "output directory override");
    cmd_run->add_option("--seeds", seeds_csv, "comma-separated seed override");

    CLI::App* cmd_grid = app.add_subcommand("grid", "run a Cartesian parameter sweep");
    cmd_grid->add_option("--config", config_path, "base spec JSON path")->required();
    cmd_grid->add_option("--axis", axis_args, "axis as PARAM=v1,v2,...")->required();
    cmd_grid->add_option("--out", out_dir, "output directory override");
    cmd_grid->add_option("--seeds", seeds_csv, "comma-separated seed override");
    cmd_grid->add_option("--workers", workers, "concurrent grid cells");

    CLI::App* cmd_table = app.add_subcommand("table", "summarize a rows CSV");
    cmd_table->add_option("--rows", rows_path, "rows CSV path")->required();
    cmd_table->add_option("--group-by", group_by_csv, "comma-separated grouping fields")
        ->required();
    cmd_table->add_option("--metric", metric, "metric column to aggregate")->required();
    cmd_table->add_option("--out", table_out, "write the summary CSV here");

    CLI::App* cmd_validate = app.add_subcommand("validate", "check a config and exit");
    cmd_validate->add_option("--config", config_path, "spec JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_validate->parsed()) {
            fedsim::load_spec(config_path);
            std::cout << "ok\n";
            return kExitOk;
        }
        if (cmd_run->parsed()) {
            fedsim::ExperimentSpec spec = fedsim::load_spec(config_path);
            apply_overrides(spec, out_dir, seeds_csv);
            const int code = report_rows(fedsim::run_single(spec));
            std::cout << "outputs in " << spec.out_dir << "\n";
            return code;
        }
        if (cmd_grid->parsed()) {
            fedsim::ExperimentSpec spec = fedsim::load_spec(config_path);
            apply_overrides(spec, out_dir, seeds_csv);
            std::vector<fedsim::GridAxis> axes;
            axes.reserve(axis_args.size());
            for (const auto& arg : axis_args) axes.push_back(parse_axis(arg));
            fedsim::RunOptions opts;
            opts.workers = cmd_grid->count("--workers") > 0 ? std::max(1, workers) : spec.workers;
            const int code = report_rows(fedsim::run_grid(spec, axes, opts));
            std::cout << "outputs in " << spec.out_dir << "\n";
            return code;
        }
        if (cmd_table->parsed()) {
            const fedsim::CsvTable table = fedsim::load_csv_table(rows_path);
            fedsim::CsvTable summary;
            const std::string text =
                fedsim::summarize_table(table, split_list(group_by_csv), metric, &summary);
            std::cout << text;
            if (!table_out.empty()) fedsim::save_csv_table(summary, table_out);
            return kExitOk;
        }
    } catch (const fedsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fedsim::ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fedsim::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
