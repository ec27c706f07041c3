#include "nergpsa/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nergpsa/errors.hpp"

namespace nergpsa::csv {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += v[i];
  }
  return s;
}

std::vector<Field> split(std::string_view line) {
  std::vector<Field> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const auto end = comma == std::string_view::npos ? line.size() : comma;
    std::string_view tok = line.substr(start, end - start);
    std::size_t col = start + 1;
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) {
      tok.remove_prefix(1);
      ++col;
    }
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.remove_suffix(1);
    out.push_back({std::string(tok), col});
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string Table::where(const Row& row, std::size_t field) const {
  std::ostringstream os;
  os << path << ":" << row.line << ":" << row.fields.at(field).column;
  return os.str();
}

double Table::number(const Row& row, std::size_t field) const {
  const auto& t = row.fields.at(field).text;
  double v = 0.0;
  const auto* first = t.data();
  const auto* last = t.data() + t.size();
  const auto res = std::from_chars(first, last, v);
  if (t.empty() || res.ec != std::errc() || res.ptr != last) {
    throw ValidationError(where(row, field) + ": column '" + header.at(field) +
                          "' expects a number, got '" + t + "'");
  }
  if (!std::isfinite(v)) {
    throw ValidationError(where(row, field) + ": column '" + header.at(field) +
                          "' must be finite");
  }
  return v;
}

const std::string& Table::text(const Row& row, std::size_t field) const {
  return row.fields.at(field).text;
}

Table parse(std::string_view content, const std::string& path,
            const std::vector<std::string>& expected) {
  Table t;
  t.path = path;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos <= content.size()) {
    const auto nl = content.find('\n', pos);
    std::string_view line =
        content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? content.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    auto fields = split(line);
    if (!have_header) {
      if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") {
        fields = split(line.substr(3));
      }
      for (const auto& f : fields) t.header.push_back(f.text);
      if (t.header != expected) {
        throw ValidationError(path + ":" + std::to_string(line_no) + ":1: expected header '" +
                              join(expected) + "', got '" + join(t.header) + "'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ":1: expected " +
                            std::to_string(t.header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    t.rows.push_back({line_no, std::move(fields)});
  }
  if (!have_header) throw ValidationError(path + ":1:1: file is empty (missing header)");
  return t;
}

Table read(const std::string& path, const std::vector<std::string>& expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path, expected);
}

std::string format(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace nergpsa::csv
