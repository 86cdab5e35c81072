#include "heatplan/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "heatplan/errors.hpp"

namespace heatplan::csv {

std::size_t Table::column(const std::string& name, const std::string& file_hint) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw SchemaError(file_hint + ": missing required column '" + name + "'");
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        std::string field = line.substr(start, comma == std::string::npos ? comma : comma - start);
        // trim whitespace and a possible trailing CR
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ' || field.back() == '\t')) {
            field.pop_back();
        }
        std::size_t lead = 0;
        while (lead < field.size() && (field[lead] == ' ' || field[lead] == '\t')) {
            ++lead;
        }
        fields.push_back(field.substr(lead));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open file: " + path.string());
    }
    Table table;
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError(path.string() + ": empty file, expected a header line");
    }
    table.header = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        table.rows.push_back(split_line(line));
    }
    return table;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last || text.empty()) {
        throw ValidationError(context + ": not a number: '" + text + "'");
    }
    return value;
}

long parse_long(const std::string& text, const std::string& context) {
    long value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last || text.empty()) {
        throw ValidationError(context + ": not an integer: '" + text + "'");
    }
    return value;
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write file: " + path.string());
    }
    for (const auto& line : lines) {
        out << line << '\n';
    }
}

} // namespace heatplan::csv
