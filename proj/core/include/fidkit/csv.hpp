#pragma once

#include <string>
#include <vector>

#include "fidkit/types.hpp"

namespace fidkit {

/// Shortest decimal form that parses back to the same binary64 value
/// (up to 17 significant digits).
std::string format_double(double v);

/// Tabular CSV: comma-separated, one header row, LF line endings.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    int column(const std::string& name) const;  // -1 when absent
    std::vector<double> numeric_column(const std::string& name) const;
};

std::string to_csv(const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::string& path);

/// One vector per row, no header; the replicate-matrix convention.
void write_vector_rows(const std::string& path, const std::vector<Vector>& rows);
std::vector<Vector> read_vector_rows(const std::string& path);

}  // namespace fidkit
