#include "qmediate/csv.hpp"

#include "qmediate/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace qmediate {

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw IngestError("missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> cells;
    std::string cell;
    for (char ch : line) {
        if (ch == delimiter) {
            cells.push_back(cell);
            cell.clear();
        } else if (ch != '\r') {
            cell.push_back(ch);
        }
    }
    cells.push_back(cell);
    return cells;
}

std::string trimmed(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && (s[begin] == ' ' || s[begin] == '\t')) {
        ++begin;
    }
    while (end > begin && (s[end - 1] == ' ' || s[end - 1] == '\t')) {
        --end;
    }
    return s.substr(begin, end - begin);
}

} // namespace

CsvTable read_csv(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) {
        throw IngestError("cannot open CSV file '" + path + "'");
    }
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw IngestError("empty CSV file '" + path + "'");
    }
    for (const std::string& cell : split_line(line, delimiter)) {
        table.header.push_back(trimmed(cell));
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto cells = split_line(line, delimiter);
        if (cells.size() != table.header.size()) {
            throw IngestError("row " + std::to_string(line_no) + " of '" + path + "' has " +
                              std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(table.header.size()));
        }
        for (std::string& cell : cells) {
            cell = trimmed(cell);
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows, char delimiter) {
    std::ofstream out(path);
    if (!out) {
        throw IngestError("cannot write CSV file '" + path + "'");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i > 0) {
            out << delimiter;
        }
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i > 0) {
                out << delimiter;
            }
            out << row[i];
        }
        out << '\n';
    }
}

std::string format_double(double v) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, result.ptr);
}

double parse_double_cell(const std::string& cell, std::size_t row_1based,
                         const std::string& column_name) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc{} || result.ptr != end || cell.empty()) {
        throw IngestError("row " + std::to_string(row_1based) + ", column '" + column_name +
                          "': cannot parse '" + cell + "' as a number");
    }
    return value;
}

} // namespace qmediate
