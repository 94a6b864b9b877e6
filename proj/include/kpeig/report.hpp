#pragma once

#include <charconv>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace kpeig {

enum class Format { text, csv, json };

inline Format parse_format(const std::string& s) {
    if (s == "text") return Format::text;
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    throw std::invalid_argument("unknown format: " + s);
}

/// One table cell: empty state renders as "n/a" (text), empty field (csv) or
/// null (json).
using Cell = std::variant<std::monostate, double, long long, bool, std::string>;

/// Column-named table; the single rendering currency of the CLI.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::vector<Cell>& add_row() {
        rows.emplace_back(columns.size());
        return rows.back();
    }
};

namespace detail {

inline std::string fmt_double_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12f", v);
    return buf;
}

/// Shortest-round-trip is not required; 17 significant digits always
/// round-trip IEEE doubles.
inline std::string fmt_double_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string cell_text(const Cell& c) {
    if (std::holds_alternative<std::monostate>(c)) return "n/a";
    if (const auto* d = std::get_if<double>(&c)) return fmt_double_fixed(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "yes" : "no";
    return std::get<std::string>(c);
}

inline std::string cell_csv(const Cell& c) {
    if (std::holds_alternative<std::monostate>(c)) return "";
    if (const auto* d = std::get_if<double>(&c)) return fmt_double_full(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char ch : s) {
        if (ch == '"') quoted += '"';
        quoted += ch;
    }
    quoted += '"';
    return quoted;
}

inline nlohmann::json cell_json(const Cell& c) {
    if (std::holds_alternative<std::monostate>(c)) return nullptr;
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    if (const auto* b = std::get_if<bool>(&c)) return *b;
    return std::get<std::string>(c);
}

}  // namespace detail

/// text: aligned columns, reals at 12 decimals.  csv: RFC-4180-style, header
/// row, 17 significant digits.  json: array of row objects, absent values as
/// null.  Output bytes are a pure function of the table and format.
inline std::string render(const Table& table, Format format) {
    std::ostringstream out;
    switch (format) {
        case Format::text: {
            std::vector<std::size_t> width(table.columns.size());
            std::vector<std::vector<std::string>> cells;
            for (std::size_t j = 0; j < table.columns.size(); ++j)
                width[j] = table.columns[j].size();
            for (const auto& row : table.rows) {
                auto& r = cells.emplace_back();
                for (std::size_t j = 0; j < row.size(); ++j) {
                    r.push_back(detail::cell_text(row[j]));
                    width[j] = std::max(width[j], r.back().size());
                }
            }
            for (std::size_t j = 0; j < table.columns.size(); ++j) {
                out << (j ? "  " : "");
                out << table.columns[j] << std::string(width[j] - table.columns[j].size(), ' ');
            }
            out << '\n';
            for (const auto& r : cells) {
                for (std::size_t j = 0; j < r.size(); ++j) {
                    out << (j ? "  " : "");
                    out << r[j];
                    if (j + 1 < r.size()) out << std::string(width[j] - r[j].size(), ' ');
                }
                out << '\n';
            }
            break;
        }
        case Format::csv: {
            for (std::size_t j = 0; j < table.columns.size(); ++j)
                out << (j ? "," : "") << detail::cell_csv(Cell{table.columns[j]});
            out << "\r\n";
            for (const auto& row : table.rows) {
                for (std::size_t j = 0; j < row.size(); ++j)
                    out << (j ? "," : "") << detail::cell_csv(row[j]);
                out << "\r\n";
            }
            break;
        }
        case Format::json: {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& row : table.rows) {
                nlohmann::json obj = nlohmann::json::object();
                for (std::size_t j = 0; j < row.size(); ++j)
                    obj[table.columns[j]] = detail::cell_json(row[j]);
                arr.push_back(obj);
            }
            out << arr.dump(2) << '\n';
            break;
        }
    }
    return out.str();
}

}  // namespace kpeig
