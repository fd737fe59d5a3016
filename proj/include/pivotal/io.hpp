#pragma once

#include <string>
#include <vector>

#include "pivotal/core.hpp"

namespace pivotal {

// Raw weight-file contents before validation; ids stay empty when the file
// carries none.
struct WeightFile {
  std::vector<double> weights;
  std::vector<std::string> ids;
};

// CSV with a required header: either `id,weight` or a single `weight` column.
WeightFile parse_weight_csv(const std::string& text, const std::string& origin);

// JSON array of numbers, or of {"id": string, "weight": number} objects.
WeightFile parse_weight_json(const std::string& text, const std::string& origin);

// Dispatches on content: a document starting with '[' is JSON, else CSV.
WeightFile load_weight_file(const std::string& path);

// JSON array of zero-based indices, or of id strings resolved against wv.
SubsetSpec load_subset_file(const std::string& path, const WeightVector& wv);

// JSON array of zero-based indices forming a permutation of [0, n).
std::vector<std::size_t> load_order_file(const std::string& path, std::size_t n);

// Accepts "0.1333", "1e-3", or an exact fraction "2/15".
double parse_real_or_fraction(const std::string& text);

// parse_real_or_fraction plus "inf"/"infinity" (case-insensitive).
double parse_real_fraction_or_inf(const std::string& text);

std::string read_text_file(const std::string& path);

}  // namespace pivotal
