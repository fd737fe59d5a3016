#include "pivotal/io.hpp"

#include "pivotal/sampler.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace pivotal {

namespace {

using nlohmann::json;

std::string trimmed(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lowered(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trimmed(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double_strict(const std::string& text, const std::string& context) {
  const std::string t = trimmed(text);
  if (t.empty()) fail(ErrorCode::ParseError, context + ": empty number");
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(t, &consumed);
  } catch (const std::exception&) {
    fail(ErrorCode::ParseError, context + ": cannot parse number '" + t + "'");
  }
  if (consumed != t.size())
    fail(ErrorCode::ParseError, context + ": trailing characters in number '" + t + "'");
  return value;
}

json parse_json_document(const std::string& text, const std::string& origin) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) fail(ErrorCode::ParseError, origin + ": malformed JSON");
  return doc;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, "cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

WeightFile parse_weight_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_header = false;
  bool with_ids = false;
  WeightFile out;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trimmed(line).empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no);

    if (!have_header) {
      const auto cells = split_csv_row(line);
      if (cells.size() == 2 && lowered(cells[0]) == "id" && lowered(cells[1]) == "weight") {
        with_ids = true;
      } else if (cells.size() == 1 && lowered(cells[0]) == "weight") {
        with_ids = false;
      } else {
        fail(ErrorCode::ParseError, where + ": expected header 'id,weight' or 'weight'");
      }
      have_header = true;
      continue;
    }

    const auto cells = split_csv_row(line);
    if (with_ids) {
      if (cells.size() != 2) fail(ErrorCode::ParseError, where + ": expected 2 columns");
      if (cells[0].empty()) fail(ErrorCode::ParseError, where + ": empty id");
      out.ids.push_back(cells[0]);
      out.weights.push_back(parse_double_strict(cells[1], where));
    } else {
      if (cells.size() != 1) fail(ErrorCode::ParseError, where + ": expected 1 column");
      out.weights.push_back(parse_double_strict(cells[0], where));
    }
  }

  if (!have_header) fail(ErrorCode::ParseError, origin + ": missing header row");
  if (out.weights.empty()) fail(ErrorCode::ParseError, origin + ": no data rows");
  return out;
}

WeightFile parse_weight_json(const std::string& text, const std::string& origin) {
  const json doc = parse_json_document(text, origin);
  if (!doc.is_array() || doc.empty())
    fail(ErrorCode::ParseError, origin + ": expected a nonempty JSON array");

  WeightFile out;
  const bool object_form = doc.front().is_object();
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& entry = doc[i];
    const std::string where = origin + ": entry " + std::to_string(i);
    if (object_form) {
      if (!entry.is_object() || !entry.contains("id") || !entry.contains("weight") ||
          !entry["id"].is_string() || !entry["weight"].is_number())
        fail(ErrorCode::ParseError, where + ": expected {\"id\": string, \"weight\": number}");
      out.ids.push_back(entry["id"].get<std::string>());
      out.weights.push_back(entry["weight"].get<double>());
    } else {
      if (!entry.is_number()) fail(ErrorCode::ParseError, where + ": expected a number");
      out.weights.push_back(entry.get<double>());
    }
  }
  return out;
}

WeightFile load_weight_file(const std::string& path) {
  const std::string text = read_text_file(path);
  const std::string head = trimmed(text);
  if (!head.empty() && (head.front() == '[' || head.front() == '{'))
    return parse_weight_json(text, path);
  return parse_weight_csv(text, path);
}

SubsetSpec load_subset_file(const std::string& path, const WeightVector& wv) {
  const json doc = parse_json_document(read_text_file(path), path);
  if (!doc.is_array()) fail(ErrorCode::ParseError, path + ": expected a JSON array");

  std::vector<std::size_t> indices;
  indices.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& entry = doc[i];
    const std::string where = path + ": entry " + std::to_string(i);
    if (entry.is_number_unsigned() || entry.is_number_integer()) {
      const long long v = entry.get<long long>();
      if (v < 0) fail(ErrorCode::ParseError, where + ": negative index");
      indices.push_back(static_cast<std::size_t>(v));
    } else if (entry.is_string()) {
      if (!wv.has_ids())
        fail(ErrorCode::ParseError, where + ": id strings need a weight file with ids");
      const std::string id = entry.get<std::string>();
      const auto& ids = wv.ids();
      const auto it = std::find(ids.begin(), ids.end(), id);
      if (it == ids.end()) fail(ErrorCode::ParseError, where + ": unknown id '" + id + "'");
      indices.push_back(static_cast<std::size_t>(it - ids.begin()));
    } else {
      fail(ErrorCode::ParseError, where + ": expected an index or an id string");
    }
  }
  return make_subset(std::move(indices), wv.size());
}

std::vector<std::size_t> load_order_file(const std::string& path, std::size_t n) {
  const json doc = parse_json_document(read_text_file(path), path);
  if (!doc.is_array()) fail(ErrorCode::ParseError, path + ": expected a JSON array");
  std::vector<std::size_t> order;
  order.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& entry = doc[i];
    if (!entry.is_number_integer() && !entry.is_number_unsigned())
      fail(ErrorCode::ParseError, path + ": entry " + std::to_string(i) + ": expected an index");
    const long long v = entry.get<long long>();
    if (v < 0)
      fail(ErrorCode::ParseError, path + ": entry " + std::to_string(i) + ": negative index");
    order.push_back(static_cast<std::size_t>(v));
  }
  check_permutation(order, n);
  return order;
}

double parse_real_or_fraction(const std::string& text) {
  const std::string t = trimmed(text);
  const std::size_t slash = t.find('/');
  if (slash == std::string::npos) return parse_double_strict(t, "value '" + t + "'");
  const double num = parse_double_strict(t.substr(0, slash), "fraction '" + t + "'");
  const double den = parse_double_strict(t.substr(slash + 1), "fraction '" + t + "'");
  if (den == 0.0) fail(ErrorCode::ParseError, "fraction '" + t + "': zero denominator");
  return num / den;
}

double parse_real_fraction_or_inf(const std::string& text) {
  const std::string t = lowered(trimmed(text));
  if (t == "inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  return parse_real_or_fraction(text);
}

}  // namespace pivotal
