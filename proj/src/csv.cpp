#include "physlearn/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "physlearn/errors.hpp"

namespace physlearn::csv {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(n));
}

Row split_line(std::string_view line) {
  Row out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Table read(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  Table table;
  std::string line;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (header_pending) {
      table.header = split_line(line);
      header_pending = false;
      continue;
    }
    table.rows.push_back(split_line(line));
  }
  return table;
}

void write(const std::filesystem::path& path, const Table& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  auto emit = [&out](const Row& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  };
  if (!table.header.empty()) emit(table.header);
  for (const auto& row : table.rows) emit(row);
}

double parse_double(std::string_view field, std::string_view context) {
  // strtod rather than from_chars: GCC 11's from_chars<double> is fine, but
  // strtod also accepts "inf"/"nan" spellings written by other tools.
  std::string buf(field);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw InputError(std::string(context) + ": not a number: '" + buf + "'");
  }
  return v;
}

long long parse_int(std::string_view field, std::string_view context) {
  long long v = 0;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw InputError(std::string(context) + ": not an integer: '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace physlearn::csv
