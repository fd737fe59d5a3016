#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>

#include "doctest.h"
#include "pivotal/core.hpp"
#include "pivotal/io.hpp"

using namespace pivotal;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a pivotal::Error");
  return ErrorCode::UsageError;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected a pivotal::Error");
  return {};
}

// Scratch file living for one test case.
class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("pivotal_io_test_" + std::to_string(++counter) + ".tmp"))
                .string();
    std::ofstream out(path_, std::ios::binary);
    out << contents;
  }
  ~TempFile() { std::remove(path_.c_str()); }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace

TEST_CASE("parse_weight_csv with id column") {
  auto wf = parse_weight_csv("id,weight\nalpha,0.1\nbeta,0.2\ngamma,0.7\n", "test");
  REQUIRE(wf.weights.size() == 3);
  CHECK(wf.weights[0] == 0.1);
  CHECK(wf.weights[2] == 0.7);
  REQUIRE(wf.ids.size() == 3);
  CHECK(wf.ids[1] == "beta");
}

TEST_CASE("parse_weight_csv weight-only column, CRLF, blanks, spacing") {
  auto wf = parse_weight_csv("Weight\r\n\r\n 0.25 \r\n0.75\r\n\r\n", "test");
  REQUIRE(wf.weights.size() == 2);
  CHECK(wf.weights[0] == 0.25);
  CHECK(wf.weights[1] == 0.75);
  CHECK(wf.ids.empty());
  // Header matching is case-insensitive.
  CHECK(parse_weight_csv("ID,WEIGHT\nx,1.0\n", "test").ids[0] == "x");
}

TEST_CASE("parse_weight_csv malformed inputs") {
  CHECK(code_of([] { (void)parse_weight_csv("0.5\n0.5\n", "t"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_weight_csv("", "t"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_weight_csv("weight\n", "t"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_weight_csv("weight\n0.5,0.5\n", "t"); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_weight_csv("id,weight\n,0.5\n", "t"); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_weight_csv("id,weight\na,0.5\nb\n", "t"); }) ==
        ErrorCode::ParseError);
  // The failing line number is part of the message.
  auto msg = message_of([] { (void)parse_weight_csv("weight\n0.5\noops\n", "t"); });
  CHECK(msg.find("t:3") != std::string::npos);
  msg = message_of([] { (void)parse_weight_csv("weight\n0.5x\n", "t"); });
  CHECK(msg.find("0.5x") != std::string::npos);
}

TEST_CASE("parse_weight_json number and object forms") {
  auto wf = parse_weight_json("[0.1, 0.2, 0.7]", "test");
  REQUIRE(wf.weights.size() == 3);
  CHECK(wf.weights[1] == 0.2);
  CHECK(wf.ids.empty());

  wf = parse_weight_json(
      R"([{"id": "a", "weight": 0.4}, {"id": "b", "weight": 0.6}])", "test");
  REQUIRE(wf.weights.size() == 2);
  CHECK(wf.weights[1] == 0.6);
  CHECK(wf.ids[0] == "a");
}

TEST_CASE("parse_weight_json malformed inputs") {
  CHECK(code_of([] { (void)parse_weight_json("[0.1, oops]", "t"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_weight_json("{}", "t"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_weight_json("[]", "t"); }) == ErrorCode::ParseError);
  // Mixed entry kinds: the first entry fixes the form.
  CHECK(code_of([] {
          (void)parse_weight_json(R"([{"id": "a", "weight": 0.4}, 0.6])", "t");
        }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_weight_json(R"([0.4, {"id": "a", "weight": 0.6}])", "t"); }) ==
        ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_weight_json(R"([{"id": 3, "weight": 0.4}])", "t"); }) ==
        ErrorCode::ParseError);
}

TEST_CASE("load_weight_file sniffs JSON vs CSV") {
  TempFile js("  [0.3, 0.7]");
  CHECK(load_weight_file(js.path()).weights.size() == 2);

  TempFile csv("weight\n0.3\n0.7\n");
  CHECK(load_weight_file(csv.path()).weights.size() == 2);

  CHECK(code_of([] { (void)load_weight_file("/nonexistent/pivotal.csv"); }) ==
        ErrorCode::ParseError);
}

TEST_CASE("load_subset_file by index and by id") {
  auto wv = validate_weights({0.1, 0.2, 0.3, 0.4}, 2, false, {"a", "b", "c", "d"});

  TempFile by_index("[3, 0, 3]");
  auto a = load_subset_file(by_index.path(), wv);
  REQUIRE(a.size() == 2);  // duplicates collapse
  CHECK(a.contains(0));
  CHECK(a.contains(3));
  CHECK_FALSE(a.contains(1));

  TempFile by_id(R"(["b", "d"])");
  auto b = load_subset_file(by_id.path(), wv);
  CHECK(b.contains(1));
  CHECK(b.contains(3));

  TempFile unknown(R"(["nope"])");
  CHECK(code_of([&] { (void)load_subset_file(unknown.path(), wv); }) == ErrorCode::ParseError);

  TempFile out_of_range("[4]");
  CHECK(code_of([&] { (void)load_subset_file(out_of_range.path(), wv); }) ==
        ErrorCode::IndexOutOfRange);

  TempFile negative("[-1]");
  CHECK(code_of([&] { (void)load_subset_file(negative.path(), wv); }) == ErrorCode::ParseError);

  auto anon = validate_weights({0.5, 0.5}, 1);
  TempFile ids_for_anon(R"(["a"])");
  CHECK(code_of([&] { (void)load_subset_file(ids_for_anon.path(), anon); }) ==
        ErrorCode::ParseError);

  TempFile not_array(R"({"subset": [1]})");
  CHECK(code_of([&] { (void)load_subset_file(not_array.path(), wv); }) == ErrorCode::ParseError);
}

TEST_CASE("load_order_file wants a full permutation") {
  TempFile good("[2, 0, 1]");
  auto order = load_order_file(good.path(), 3);
  CHECK(order == std::vector<std::size_t>{2, 0, 1});

  TempFile repeated("[0, 0, 1]");
  CHECK(code_of([&] { (void)load_order_file(repeated.path(), 3); }) ==
        ErrorCode::InvalidPermutation);

  TempFile short_list("[0, 1]");
  CHECK(code_of([&] { (void)load_order_file(short_list.path(), 3); }) ==
        ErrorCode::InvalidPermutation);

  TempFile not_index(R"([0, "one", 2])");
  CHECK(code_of([&] { (void)load_order_file(not_index.path(), 3); }) == ErrorCode::ParseError);
}

TEST_CASE("parse_real_or_fraction") {
  CHECK(parse_real_or_fraction("0.1333") == 0.1333);
  CHECK(parse_real_or_fraction("1e-3") == 1e-3);
  CHECK(parse_real_or_fraction(" 2/15 ") == 2.0 / 15.0);
  CHECK(parse_real_or_fraction("1/3") == 1.0 / 3.0);
  CHECK(code_of([] { (void)parse_real_or_fraction("3/0"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_real_or_fraction("abc"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_real_or_fraction("0.5extra"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { (void)parse_real_or_fraction(""); }) == ErrorCode::ParseError);
}

TEST_CASE("parse_real_fraction_or_inf") {
  CHECK(std::isinf(parse_real_fraction_or_inf("inf")));
  CHECK(std::isinf(parse_real_fraction_or_inf("Infinity")));
  CHECK(std::isinf(parse_real_fraction_or_inf(" INF ")));
  CHECK(parse_real_fraction_or_inf("2/15") == 2.0 / 15.0);
  CHECK(code_of([] { (void)parse_real_fraction_or_inf("infx"); }) == ErrorCode::ParseError);
}
