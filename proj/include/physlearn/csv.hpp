#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace physlearn::csv {

// Round-trip representation of a double (17 significant digits).
std::string format_double(double value);

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;
};

// Splits on commas; surrounding whitespace is trimmed. No quoting support:
// every file this project writes is purely numeric.
Row split_line(std::string_view line);

// Reads a CSV file. When has_header is false, Table::header stays empty.
Table read(const std::filesystem::path& path, bool has_header);

void write(const std::filesystem::path& path, const Table& table);

double parse_double(std::string_view field, std::string_view context);
long long parse_int(std::string_view field, std::string_view context);

}  // namespace physlearn::csv
