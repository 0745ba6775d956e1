#include "qspline/json_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <utility>

#include "qspline/errors.hpp"

namespace qspline {

std::string format_double(double v) {
  if (!std::isfinite(v)) throw input_error("cannot serialize a non-finite number");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void append_escaped(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

}  // namespace

void JsonWriter::separate() {
  if (pending_key_) {
    pending_key_ = false;
    return;
  }
  if (open_.empty()) {
    if (!out_.empty()) throw input_error("json document already complete");
    return;
  }
  if (open_.back() == '{')
    throw input_error("json object member needs a key first");
  if (first_.back())
    first_.back() = false;
  else
    out_.push_back(',');
}

JsonWriter& JsonWriter::begin_object() {
  separate();
  out_.push_back('{');
  open_.push_back('{');
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_object() {
  if (open_.empty() || open_.back() != '{' || pending_key_)
    throw input_error("unbalanced json object");
  out_.push_back('}');
  open_.pop_back();
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::begin_array() {
  separate();
  out_.push_back('[');
  open_.push_back('[');
  first_.push_back(true);
  return *this;
}

JsonWriter& JsonWriter::end_array() {
  if (open_.empty() || open_.back() != '[' || pending_key_)
    throw input_error("unbalanced json array");
  out_.push_back(']');
  open_.pop_back();
  first_.pop_back();
  return *this;
}

JsonWriter& JsonWriter::key(std::string_view name) {
  if (open_.empty() || open_.back() != '{' || pending_key_)
    throw input_error("json key outside an object");
  if (first_.back())
    first_.back() = false;
  else
    out_.push_back(',');
  append_escaped(out_, name);
  out_.push_back(':');
  pending_key_ = true;
  return *this;
}

JsonWriter& JsonWriter::value(double v) {
  separate();
  out_ += format_double(v);
  return *this;
}

JsonWriter& JsonWriter::value(int v) { return value(static_cast<std::int64_t>(v)); }

JsonWriter& JsonWriter::value(std::int64_t v) {
  separate();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t v) {
  separate();
  out_ += std::to_string(v);
  return *this;
}

JsonWriter& JsonWriter::value(bool v) {
  separate();
  out_ += v ? "true" : "false";
  return *this;
}

JsonWriter& JsonWriter::value(std::string_view s) {
  separate();
  append_escaped(out_, s);
  return *this;
}

JsonWriter& JsonWriter::value(const char* s) {
  return value(std::string_view(s));
}

const std::string& JsonWriter::str() const {
  if (!open_.empty() || pending_key_ || out_.empty())
    throw input_error("json document is incomplete");
  return out_;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_field(const std::string& raw, const std::string& path, int lineno) {
  std::size_t a = 0, b = raw.size();
  while (a < b && std::isspace(static_cast<unsigned char>(raw[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(raw[b - 1]))) --b;
  const std::string tok = raw.substr(a, b - a);
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw input_error(path + ":" + std::to_string(lineno) + ": bad number '" +
                      tok + "'");
  }
}

bool has_alpha(const std::string& line) {
  for (char c : line)
    if (std::isalpha(static_cast<unsigned char>(c)) && c != 'e' && c != 'E')
      return true;
  return false;
}

// Numeric rows of the file; '#' comments, blanks, and one leading header
// row are dropped, trailing carriage returns stripped.
std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t a = 0;
    while (a < line.size() && std::isspace(static_cast<unsigned char>(line[a])))
      ++a;
    if (a == line.size() || line[a] == '#') continue;
    if (!seen_data && has_alpha(line)) continue;
    seen_data = true;
    std::vector<double> row;
    for (const std::string& f : split_fields(line))
      row.push_back(parse_field(f, path, lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw input_error("'" + path + "' holds no numeric rows");
  return rows;
}

}  // namespace

SplineDataset read_xy_csv(const std::string& path) {
  const std::vector<std::vector<double>> rows = read_rows(path);
  std::vector<double> x, y;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 2)
      throw input_error("'" + path + "' row " + std::to_string(r + 1) +
                        " needs exactly x,y");
    x.push_back(rows[r][0]);
    y.push_back(rows[r][1]);
  }
  return make_dataset(std::move(x), std::move(y));
}

std::vector<double> read_column_csv(const std::string& path) {
  std::vector<double> values;
  for (const std::vector<double>& row : read_rows(path))
    values.insert(values.end(), row.begin(), row.end());
  return values;
}

Eigen::MatrixXd read_matrix_csv(const std::string& path) {
  const std::vector<std::vector<double>> rows = read_rows(path);
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols)
      throw input_error("'" + path + "' row " + std::to_string(r + 1) +
                        " has a different field count");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

}  // namespace qspline
