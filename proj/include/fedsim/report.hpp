#pragma once

// Tabular result handling: CSV persistence and grouped median summaries.

#include <string>
#include <vector>

namespace fedsim {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // -1 when missing
};

CsvTable load_csv_table(const std::string& path);
void save_csv_table(const CsvTable& table, const std::string& path);

/// %.17g rendering used for every float written to disk.
std::string format_double(double v);

/// Grouped median/min/max of `metric` over non-diverged rows. Diverged rows
/// (a `diverged` column equal to "1") are excluded and counted in a footnote.
/// Returns the aligned-text rendering; `csv_out`, when given, receives the
/// same summary as a table.
std::string summarize_table(const CsvTable& table, const std::vector<std::string>& group_by,
                            const std::string& metric, CsvTable* csv_out = nullptr);

double median(std::vector<double> values);

}  // namespace fedsim
