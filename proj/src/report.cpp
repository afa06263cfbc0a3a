#include "fedsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fedsim/errors.hpp"

namespace fedsim {

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

CsvTable load_csv_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_csv_table: cannot open " + path);
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError("load_csv_table: empty file " + path);
    table.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != table.header.size())
            throw IoError("load_csv_table: ragged row in " + path);
        table.rows.push_back(std::move(cells));
    }
    return table;
}

void save_csv_table(const CsvTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_csv_table: cannot open " + path);
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i > 0) out << ',';
        out << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) out << ',';
            out << row[i];
        }
        out << '\n';
    }
    if (!out) throw IoError("save_csv_table: write failed for " + path);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double median(std::vector<double> values) {
    if (values.empty()) throw UndefinedMetricError("median: empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::string summarize_table(const CsvTable& table, const std::vector<std::string>& group_by,
                            const std::string& metric, CsvTable* csv_out) {
    if (table.rows.empty()) throw ConfigError("rows", "no rows to summarize");
    std::vector<int> key_cols;
    for (const auto& field : group_by) {
        const int c = table.column(field);
        if (c < 0) throw ConfigError("group_by", "unknown field '" + field + "'");
        key_cols.push_back(c);
    }
    const int metric_col = table.column(metric);
    if (metric_col < 0) throw ConfigError("metric", "unknown field '" + metric + "'");
    const int diverged_col = table.column("diverged");

    std::map<std::vector<std::string>, std::vector<double>> groups;
    std::size_t diverged_count = 0;
    std::size_t undefined_count = 0;
    for (const auto& row : table.rows) {
        if (diverged_col >= 0 && row[static_cast<std::size_t>(diverged_col)] == "1") {
            diverged_count++;
            continue;
        }
        const double value = std::stod(row[static_cast<std::size_t>(metric_col)]);
        if (std::isnan(value)) {
            undefined_count++;
            continue;
        }
        std::vector<std::string> key;
        key.reserve(key_cols.size());
        for (int c : key_cols) key.push_back(row[static_cast<std::size_t>(c)]);
        groups[key].push_back(value);
    }
    if (groups.empty())
        throw ConfigError("metric", "no usable values for '" + metric + "'");

    // Column widths for the aligned-text rendering.
    std::vector<std::size_t> widths;
    for (const auto& field : group_by) widths.push_back(field.size());
    std::vector<std::vector<std::string>> lines;
    for (const auto& [key, values] : groups) {
        std::vector<std::string> line = key;
        line.push_back(format_double(median(values)));
        line.push_back(format_double(*std::min_element(values.begin(), values.end())));
        line.push_back(format_double(*std::max_element(values.begin(), values.end())));
        line.push_back(std::to_string(values.size()));
        lines.push_back(std::move(line));
    }
    std::vector<std::string> summary_header(group_by);
    summary_header.push_back(metric + "_median");
    summary_header.push_back(metric + "_min");
    summary_header.push_back(metric + "_max");
    summary_header.push_back("runs");
    widths.assign(summary_header.size(), 0);
    for (std::size_t i = 0; i < summary_header.size(); ++i)
        widths[i] = summary_header[i].size();
    for (const auto& line : lines)
        for (std::size_t i = 0; i < line.size(); ++i) widths[i] = std::max(widths[i], line[i].size());

    std::ostringstream text;
    auto emit_line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            text << cells[i] << std::string(widths[i] - cells[i].size() + 2, ' ');
        }
        text << '\n';
    };
    emit_line(summary_header);
    for (const auto& line : lines) emit_line(line);
    if (diverged_count > 0) {
        text << "# excluded " << diverged_count << " diverged run(s)\n";
    }
    if (undefined_count > 0) {
        text << "# excluded " << undefined_count << " run(s) with undefined " << metric << "\n";
    }

    if (csv_out != nullptr) {
        csv_out->header = summary_header;
        csv_out->rows = lines;
    }
    return text.str();
}

}  // namespace fedsim
