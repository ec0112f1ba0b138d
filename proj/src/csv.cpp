#include "chaoslab/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "chaoslab/errors.hpp"

namespace chaoslab {

std::size_t CsvTable::column_index(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ValidationError(fmt::format("table has no column '{}'", name));
    return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(std::string_view name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<double> CsvTable::column(std::string_view name) const {
    const std::size_t c = column_index(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(parse_real(row.at(c)));
    return out;
}

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
        throw SpecificationError(fmt::format("csv row has {} cells, header has {}", row.size(), header.size()));
    rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
    std::string out = fmt::format("{}\n", fmt::join(header, ","));
    for (const auto& row : rows) out += fmt::format("{}\n", fmt::join(row, ","));
    return out;
}

std::string format_real(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", value);
}

double parse_real(std::string_view text) {
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) throw ValidationError(fmt::format("'{}' is not a number", text));
    return v;
}

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (table.header.empty()) {
            table.header = std::move(cells);
        } else {
            if (cells.size() != table.header.size())
                throw ValidationError(fmt::format("csv line {}: {} cells, header has {}", line_no, cells.size(),
                                                  table.header.size()));
            table.rows.push_back(std::move(cells));
        }
    }
    if (table.header.empty()) throw ValidationError("csv: empty table");
    return table;
}

CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_text(path)); }

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_text(path, table.to_string()); }

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CsvTable measure_table(const EmpiricalMeasure& measure) {
    CsvTable t;
    for (std::size_t c = 0; c < measure.dim(); ++c) t.header.push_back(fmt::format("x{}", c));
    t.header.push_back("weight");
    for (std::size_t i = 0; i < measure.size(); ++i) {
        std::vector<std::string> row;
        for (double v : measure.point(i)) row.push_back(format_real(v));
        row.push_back(format_real(measure.weight(i)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

EmpiricalMeasure measure_from_table(const CsvTable& table) {
    const bool weighted = table.has_column("weight");
    std::size_t dim = 0;
    while (table.has_column(fmt::format("x{}", dim))) ++dim;
    if (dim == 0) throw ValidationError("measure table needs columns x0, x1, ...");
    std::vector<std::vector<double>> coords;
    for (std::size_t c = 0; c < dim; ++c) coords.push_back(table.column(fmt::format("x{}", c)));
    std::vector<double> points;
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        for (std::size_t c = 0; c < dim; ++c) points.push_back(coords[c][i]);
    if (!weighted) return EmpiricalMeasure::uniform(dim, std::move(points));
    return EmpiricalMeasure(dim, std::move(points), table.column("weight"));
}

CsvTable plan_table(const TransportResult& result) {
    CsvTable t;
    t.header = {"i", "j", "mass"};
    for (const auto& e : result.plan) t.rows.push_back({fmt::format("{}", e.i), fmt::format("{}", e.j), format_real(e.mass)});
    return t;
}

} // namespace chaoslab
