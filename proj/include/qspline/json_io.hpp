#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qspline/spline.hpp"

namespace qspline {

// Decimal form with 17 significant digits, enough to round trip any double.
// Non-finite values throw input_error; JSON has no spelling for them.
std::string format_double(double v);

// Streaming JSON builder with comma and nesting bookkeeping.  Every float
// goes through format_double so emitted documents round trip bit for bit.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(std::string_view name);
  JsonWriter& value(double v);
  JsonWriter& value(int v);
  JsonWriter& value(std::int64_t v);
  JsonWriter& value(std::uint64_t v);
  JsonWriter& value(bool v);
  JsonWriter& value(std::string_view s);
  JsonWriter& value(const char* s);
  // Finished document; throws input_error while containers are still open.
  const std::string& str() const;

 private:
  void separate();
  std::string out_;
  std::vector<char> open_;   // '{' or '[' per depth
  std::vector<bool> first_;  // no comma yet at this depth
  bool pending_key_ = false;
};

// x,y rows in strictly increasing x; blank lines, '#' comments, and one
// alphabetic header line are skipped.  Validation mirrors make_dataset.
SplineDataset read_xy_csv(const std::string& path);

// Every numeric field in the file, row by row.
std::vector<double> read_column_csv(const std::string& path);

// Rows of equal field counts.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

}  // namespace qspline
