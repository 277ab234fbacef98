// Strict CSV ingestion for the fit CLI: comma-separated, header row
// required, '.' decimal mark, no quoting of numerics. Errors carry the
// offending line number so CLI diagnostics can point at the input.
#pragma once

#include <charconv>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace medscore {

class CsvError : public std::runtime_error {
public:
    explicit CsvError(const std::string& what) : std::runtime_error(what) {}
};

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;  // row-major, columns.size() wide

    std::size_t column_index(const std::string& name) const {
        for (std::size_t j = 0; j < columns.size(); ++j)
            if (columns[j] == name) return j;
        std::string known;
        for (const auto& c : columns) known += (known.empty() ? "" : ", ") + c;
        throw CsvError("unknown column '" + name + "' (available: " + known + ")");
    }

    std::vector<double> column(const std::string& name) const {
        const std::size_t j = column_index(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[j]);
        return out;
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

inline std::string trimmed(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

inline CsvTable parse_csv(std::istream& in, const std::string& source = "csv") {
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1) {
            for (auto& h : detail::split_csv_line(line)) {
                const std::string name = detail::trimmed(h);
                if (name.empty())
                    throw CsvError(source + ":1: empty column name in header");
                table.columns.push_back(name);
            }
            continue;
        }
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != table.columns.size())
            throw CsvError(source + ":" + std::to_string(lineno) + ": expected " +
                           std::to_string(table.columns.size()) + " fields, got " +
                           std::to_string(fields.size()));
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const std::string f = detail::trimmed(fields[j]);
            double v;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
                throw CsvError(source + ":" + std::to_string(lineno) +
                               ": cannot parse '" + f + "' in column '" +
                               table.columns[j] + "' as a number");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (table.columns.empty())
        throw CsvError(source + ": empty input (header row required)");
    return table;
}

inline CsvTable parse_csv_string(const std::string& text,
                                 const std::string& source = "csv") {
    std::istringstream in(text);
    return parse_csv(in, source);
}

}  // namespace medscore
