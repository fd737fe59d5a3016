#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace pivotal {

// Option structs mirror the CLI flags one to one; parsing stays in the tool
// binary so these entry points are directly testable against streams.
// Every command returns its process exit code: 0 success, 1 failed verdict
// (verify only), 2 invalid input.

struct SampleOptions {
  std::string weights_file;
  int k = 0;
  std::string procedure = "x-star";
  std::string policy = "in-order";
  std::string order_file;
  bool have_seed = false;
  std::uint64_t seed = 0;
  std::uint64_t count = 1;
  bool trace = false;
  int precision = 6;
};

int cmd_sample(const SampleOptions& opt, std::ostream& out, std::ostream& err);

struct BoundsOptions {
  bool have_alpha = false;
  std::string alpha_text;
  std::string delta_text;
  int k = 0;
  std::string m_text;  // empty: infinity (analytic mode only)
  std::string weights_file;
  std::string subset_file;
  std::string side = "both";
  bool best_of_complement = false;
  std::string format = "json";
  int precision = 6;
};

int cmd_bounds(const BoundsOptions& opt, std::ostream& out, std::ostream& err);

struct TableOptions {
  int k = 100;
  std::string alpha_text = "1/5";
  std::string delta_text = "2/15";
  std::string m_list_text = "inf,1000,100,50";
  std::string format = "pretty";
  int precision = 6;
};

int cmd_table(const TableOptions& opt, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  std::string mode = "exact";
  std::string weights_file;
  std::string subset_file;
  int k = 0;
  std::string delta_text = "0.1";
  std::uint64_t trials = 100000;
  bool have_seed = false;
  std::uint64_t seed = 0;
  std::string procedure = "x-star";
  std::string policy = "in-order";
  std::string order_file;
  int jobs = 0;  // <= 0: PIVOTAL_JOBS environment variable, else 1
  std::size_t max_n = 14;
  int precision = 6;
};

int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace pivotal
