#include "fidkit/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fidkit {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void CsvTable::add_row(const std::vector<double>& values) {
    std::vector<std::string> row;
    row.reserve(values.size());
    for (double v : values) row.push_back(format_double(v));
    rows.push_back(std::move(row));
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw Error("csv: no column named '" + name + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (static_cast<std::size_t>(c) >= row.size()) throw Error("csv: ragged row");
        out.push_back(std::strtod(row[c].c_str(), nullptr));
    }
    return out;
}

std::string to_csv(const CsvTable& table) {
    std::ostringstream os;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) os << ',';
        os << table.header[i];
    }
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << row[i];
        }
        os << '\n';
    }
    return os.str();
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
    if (!out) throw Error("csv: cannot open '" + path + "' for writing");
    out << to_csv(table);
    if (!out) throw Error("csv: write failed for '" + path + "'");
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (!have_header) {
            table.header = split_fields(line);
            have_header = true;
        } else {
            table.rows.push_back(split_fields(line));
        }
    }
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("csv: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

void write_vector_rows(const std::string& path, const std::vector<Vector>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("csv: cannot open '" + path + "' for writing");
    for (const auto& v : rows) {
        for (int i = 0; i < v.size(); ++i) {
            if (i) out << ',';
            out << format_double(v[i]);
        }
        out << '\n';
    }
}

std::vector<Vector> read_vector_rows(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("csv: cannot open '" + path + "'");
    std::vector<Vector> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        // Skip a header line if the first field is not numeric.
        char* end = nullptr;
        std::strtod(fields[0].c_str(), &end);
        if (end == fields[0].c_str()) continue;
        Vector v(static_cast<int>(fields.size()));
        for (std::size_t i = 0; i < fields.size(); ++i) {
            v[static_cast<int>(i)] = std::strtod(fields[i].c_str(), nullptr);
        }
        rows.push_back(std::move(v));
    }
    return rows;
}

}  // namespace fidkit
