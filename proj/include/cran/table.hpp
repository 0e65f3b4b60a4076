#pragma once

// Result tables: a fixed column list with units and rows of numbers or
// labels. Written as TSV (`name[unit]` headers, %.17g numbers) for plotting
// and as JSON for everything else. Missing values (infeasible points) are NaN
// in memory, `nan` in TSV and null in JSON.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace cran {

struct Column {
    std::string name;
    std::string unit;  // "-" for dimensionless, "label" for text

    bool operator==(const Column&) const = default;
};

using Cell = std::variant<double, std::string>;

struct Table {
    std::string name;
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
    std::size_t column_index(const std::string& column) const;
    double number(std::size_t row, const std::string& column) const;
};

/// Throws std::invalid_argument on a table without columns or rows.
void write_tsv(std::ostream& out, const Table& table);
Table read_tsv(std::istream& in, const std::string& name = {});

nlohmann::ordered_json to_json(const Table& table);
Table table_from_json(const nlohmann::ordered_json& j);

/// %.17g, with `nan` / `inf` / `-inf` spelled out.
std::string format_number(double v);

/// Writes `text` to `path`, creating parent directories. Errors name the path.
void write_file(const std::filesystem::path& path, const std::string& text);
std::string read_file(const std::filesystem::path& path);

/// `dir/<table.name>.tsv`.
void emit_tsv(const std::filesystem::path& dir, const Table& table);

bool cells_equal(const Cell& a, const Cell& b, double rel_tol);

}  // namespace cran
