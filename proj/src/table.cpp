#include "cran/table.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cran {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos) {
            return out;
        }
        start = tab + 1;
    }
}

Cell parse_cell(const std::string& s) {
    if (s == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    if (!s.empty()) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() + s.size()) {
            return v;
        }
    }
    return s;
}

}  // namespace

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw std::invalid_argument("table '" + name + "': row has " + std::to_string(row.size()) +
                                    " cells, expected " + std::to_string(columns.size()));
    }
    rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& column) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == column) {
            return i;
        }
    }
    throw std::out_of_range("table '" + name + "' has no column '" + column + "'");
}

double Table::number(std::size_t row, const std::string& column) const {
    return std::get<double>(rows.at(row).at(column_index(column)));
}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_tsv(std::ostream& out, const Table& table) {
    if (table.columns.empty() || table.rows.empty()) {
        throw std::invalid_argument("refusing to emit empty table '" + table.name + "'");
    }
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "\t" : "") << table.columns[i].name << '[' << table.columns[i].unit << ']';
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out << '\t';
            }
            if (const auto* d = std::get_if<double>(&row[i])) {
                out << format_number(*d);
            } else {
                out << std::get<std::string>(row[i]);
            }
        }
        out << '\n';
    }
}

Table read_tsv(std::istream& in, const std::string& name) {
    Table t;
    t.name = name;
    std::string line;
    if (!std::getline(in, line)) {
        throw std::invalid_argument("TSV input is empty");
    }
    for (const auto& field : split_tabs(line)) {
        const auto open = field.rfind('[');
        if (open == std::string::npos || field.back() != ']') {
            throw std::invalid_argument("TSV header field without unit: '" + field + "'");
        }
        t.columns.push_back({field.substr(0, open), field.substr(open + 1, field.size() - open - 2)});
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<Cell> row;
        for (const auto& field : split_tabs(line)) {
            row.push_back(parse_cell(field));
        }
        t.add_row(std::move(row));
    }
    return t;
}

nlohmann::ordered_json to_json(const Table& table) {
    nlohmann::ordered_json j;
    j["name"] = table.name;
    auto cols = nlohmann::ordered_json::array();
    for (const auto& c : table.columns) {
        cols.push_back({{"name", c.name}, {"unit", c.unit}});
    }
    j["columns"] = std::move(cols);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& cell : row) {
            if (const auto* d = std::get_if<double>(&cell)) {
                if (std::isfinite(*d)) {
                    r.push_back(*d);
                } else {
                    r.push_back(nullptr);
                }
            } else {
                r.push_back(std::get<std::string>(cell));
            }
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j;
}

Table table_from_json(const nlohmann::ordered_json& j) {
    Table t;
    t.name = j.at("name").get<std::string>();
    for (const auto& c : j.at("columns")) {
        t.columns.push_back({c.at("name").get<std::string>(), c.at("unit").get<std::string>()});
    }
    for (const auto& r : j.at("rows")) {
        std::vector<Cell> row;
        for (const auto& cell : r) {
            if (cell.is_null()) {
                row.emplace_back(std::numeric_limits<double>::quiet_NaN());
            } else if (cell.is_string()) {
                row.emplace_back(cell.get<std::string>());
            } else {
                row.emplace_back(cell.get<double>());
            }
        }
        t.add_row(std::move(row));
    }
    return t;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) {
            throw std::runtime_error("cannot create directory " + path.parent_path().string() +
                                     ": " + ec.message());
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out.flush()) {
        throw std::runtime_error("write failed: " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void emit_tsv(const std::filesystem::path& dir, const Table& table) {
    std::ostringstream s;
    write_tsv(s, table);
    write_file(dir / (table.name + ".tsv"), s.str());
}

bool cells_equal(const Cell& a, const Cell& b, double rel_tol) {
    if (a.index() != b.index()) {
        return false;
    }
    if (const auto* x = std::get_if<double>(&a)) {
        const double y = std::get<double>(b);
        if (std::isnan(*x) || std::isnan(y)) {
            return std::isnan(*x) && std::isnan(y);
        }
        if (*x == y) {
            return true;
        }
        return std::abs(*x - y) <= rel_tol * std::max(std::abs(*x), std::abs(y));
    }
    return std::get<std::string>(a) == std::get<std::string>(b);
}

}  // namespace cran
