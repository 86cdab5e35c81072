#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace heatplan::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a required column; throws SchemaError naming the column.
    std::size_t column(const std::string& name, const std::string& file_hint) const;
};

/// Reads a comma-separated file with a header line. UTF-8, '.' decimal
/// separator, no quoting (none of the artifact's formats needs it).
Table read_table(const std::filesystem::path& path);

std::vector<std::string> split_line(const std::string& line);

/// Shortest decimal representation that round-trips the exact double.
std::string format_double(double value);

double parse_double(const std::string& text, const std::string& context);
long parse_long(const std::string& text, const std::string& context);

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

} // namespace heatplan::csv
