#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qmediate {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by header name; throws IngestError when missing.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
};

/// Reads a delimited table with a mandatory header row. Cells are raw
/// strings; ragged rows are an ingestion error. Quoting is not supported
/// (all consumed tables are numeric plus plain identifiers).
CsvTable read_csv(const std::string& path, char delimiter = ',');

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows, char delimiter = ',');

/// Shortest round-trip decimal form (std::to_chars), so value -> text ->
/// value is exact and output bytes are reproducible.
std::string format_double(double v);

/// Strict full-cell parse; reports the 1-based data row and column name on
/// failure.
double parse_double_cell(const std::string& cell, std::size_t row_1based,
                         const std::string& column_name);

} // namespace qmediate
