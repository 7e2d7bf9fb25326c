#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "simstudy/analysis.hpp"

namespace simstudy {

/// Empty, text, float or integer.
using Cell = std::variant<std::monostate, std::string, double, std::int64_t>;

/// Column-ordered rows ready to be written.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

enum class ExportFormat { csv, json };

ExportFormat parse_export_format(std::string_view name);

/// Config value as a cell; booleans become integers 0/1.
Cell to_cell(const Value& v);

/// Floats in shortest round-trip form; empty for monostate.
std::string cell_text(const Cell& c);

/// Columns: group axes, n, then per outcome `<o>_mean`, `<o>_se` and, with
/// `with_mean_se`, the formatted "mean (se)" column named `<o>`.
Table summary_table(const std::vector<AggregateSummary>& summaries, const std::vector<std::string>& group_axes,
                    const std::vector<std::string>& outcomes, bool with_mean_se = true);

/// Columns: group axes, avg_p, se_p, err_1pct, se_1, err_5pct, se_5.
Table rejection_table_export(const std::vector<RejectionRateRow>& rows, const std::vector<std::string>& group_axes);

struct LabeledCurve {
    Configuration group;
    EcdfCurve curve;
};

/// Columns: group axes, x, ecdf, band, lower, upper; one row per jump point.
Table ecdf_table(const std::vector<LabeledCurve>& curves, const std::vector<std::string>& group_axes);

/// RFC-4180: comma separated, CRLF line ends, fields quoted when they hold
/// a comma, quote, CR or LF.
void write_csv(const Table& table, std::ostream& out);

/// Array of objects with keys in column order; empty cells become null.
void write_json(const Table& table, std::ostream& out);

void write_table(const Table& table, ExportFormat format, std::ostream& out);

/// Writes to `path`, replacing it. Throws IoError when it cannot be written.
void export_table(const Table& table, ExportFormat format, const std::filesystem::path& path);

}  // namespace simstudy
