#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chaoslab/measure.hpp"
#include "chaoslab/transport.hpp"

namespace chaoslab {

/// Comma-separated table with a header row. Cells are stored as text so that
/// a written table reads back byte-for-byte.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(std::string_view name) const; // throws ValidationError if absent
    bool has_column(std::string_view name) const;
    std::vector<double> column(std::string_view name) const;
    void add_row(std::vector<std::string> row);
    std::string to_string() const;
};

/// Round-trip formatting: %.17g, with nan and inf spelled out.
std::string format_real(double value);
double parse_real(std::string_view text);

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// One atom per row: x0..x{d-1}, weight.
CsvTable measure_table(const EmpiricalMeasure& measure);
/// Inverse of measure_table; without a weight column the measure is uniform.
EmpiricalMeasure measure_from_table(const CsvTable& table);
/// One plan entry per row: i, j, mass.
CsvTable plan_table(const TransportResult& result);

} // namespace chaoslab
