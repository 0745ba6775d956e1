#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "qspline/errors.hpp"
#include "qspline/json_io.hpp"

using namespace qspline;

namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& body) {
  const std::filesystem::path p =
      std::filesystem::temp_directory_path() / ("qspline_io_" + name);
  std::ofstream out(p);
  out << body;
  return p;
}

}  // namespace

TEST_CASE("doubles format with seventeen significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_double(1.5) == "1.5");
  CHECK(format_double(49.0 / 64.0) == "0.765625");

  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23, 0.0, 1.0,
                   0.765625, 3.141592653589793, -7.25e-9}) {
    CHECK(std::stod(format_double(v)) == v);
  }

  CHECK_THROWS_AS(format_double(std::numeric_limits<double>::infinity()),
                  input_error);
  CHECK_THROWS_AS(format_double(std::numeric_limits<double>::quiet_NaN()),
                  input_error);
}

TEST_CASE("the writer balances and escapes documents") {
  JsonWriter w;
  w.begin_object();
  w.key("a").value(1.5);
  w.key("b").begin_array().value(1).value(2).value(true).value("x\"y\\z\n");
  w.end_array();
  w.key("c").begin_object().key("nested").value(false).key("t").value("plain");
  w.end_object();
  w.end_object();
  CHECK(w.str() ==
        "{\"a\":1.5,\"b\":[1,2,true,\"x\\\"y\\\\z\\n\"],"
        "\"c\":{\"nested\":false,\"t\":\"plain\"}}");

  const nlohmann::json parsed = nlohmann::json::parse(w.str());
  CHECK(parsed["a"].get<double>() == 1.5);
  CHECK(parsed["b"][3].get<std::string>() == "x\"y\\z\n");
  CHECK(parsed["c"]["nested"].get<bool>() == false);

  // floats survive a parse round trip bit for bit
  JsonWriter fine;
  fine.begin_object().key("v").value(0.1).end_object();
  CHECK(nlohmann::json::parse(fine.str())["v"].get<double>() == 0.1);

  JsonWriter bad;
  bad.begin_object();
  CHECK_THROWS_AS(bad.value(1.0), input_error);
  CHECK_THROWS_AS(bad.end_array(), input_error);
  CHECK_THROWS_AS(bad.str(), input_error);
  JsonWriter arr;
  arr.begin_array();
  CHECK_THROWS_AS(arr.key("k"), input_error);
  JsonWriter root;
  root.begin_object();
  root.end_object();
  CHECK_THROWS_AS(root.value(2.0), input_error);
}

TEST_CASE("csv readers load and validate") {
  const auto xy = write_temp("xy.csv", "x,y\r\n# comment\n0,1\n1.5,2\n\n3,4\n");
  const SplineDataset d = read_xy_csv(xy.string());
  CHECK(d.x == std::vector<double>{0.0, 1.5, 3.0});
  CHECK(d.y == std::vector<double>{1.0, 2.0, 4.0});

  const auto sci = write_temp("sci.csv", "1e-1,2\n2e0,3\n");
  CHECK(read_xy_csv(sci.string()).x.front() == 0.1);

  const auto col = write_temp("col.csv", "1,2\n3\n4\n");
  CHECK(read_column_csv(col.string()) == std::vector<double>{1.0, 2.0, 3.0, 4.0});

  const auto mat = write_temp("mat.csv", "2,1\n1,2\n");
  const Eigen::MatrixXd m = read_matrix_csv(mat.string());
  CHECK(m.rows() == 2);
  CHECK(m(0, 0) == 2.0);
  CHECK(m(1, 0) == 1.0);

  const auto wide = write_temp("wide.csv", "0,1,2\n");
  CHECK_THROWS_AS(read_xy_csv(wide.string()), input_error);
  const auto junk = write_temp("junk.csv", "0,1\n2,oops\n");
  CHECK_THROWS_AS(read_xy_csv(junk.string()), input_error);
  const auto order = write_temp("order.csv", "0,1\n0,2\n");
  CHECK_THROWS_AS(read_xy_csv(order.string()), input_error);
  const auto ragged = write_temp("ragged.csv", "1,2\n3\n");
  CHECK_THROWS_AS(read_matrix_csv(ragged.string()), input_error);
  const auto blank = write_temp("blank.csv", "# nothing here\n\n");
  CHECK_THROWS_AS(read_column_csv(blank.string()), input_error);
  CHECK_THROWS_AS(read_column_csv("/nonexistent/qspline.csv"), input_error);

  for (const auto& p : {xy, sci, col, mat, wide, junk, order, ragged, blank})
    std::filesystem::remove(p);
}
