#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace nergpsa::csv {

struct Field {
  std::string text;
  std::size_t column = 0;  // 1-based character column
};

struct Row {
  std::size_t line = 0;  // 1-based
  std::vector<Field> fields;
};

struct Table {
  std::string path;
  std::vector<std::string> header;
  std::vector<Row> rows;

  // "path:line:column: message"
  std::string where(const Row& row, std::size_t field) const;
  double number(const Row& row, std::size_t field) const;
  const std::string& text(const Row& row, std::size_t field) const;
};

// Plain comma-separated text, no quoting. Blank lines and a trailing CR are
// ignored. The header must equal `expected` exactly; every row must have the
// header's field count. Throws IoError / ValidationError with positions.
Table read(const std::string& path, const std::vector<std::string>& expected);
Table parse(std::string_view content, const std::string& path,
            const std::vector<std::string>& expected);

// 9 significant digits, "%.9g".
std::string format(double v);

}  // namespace nergpsa::csv
