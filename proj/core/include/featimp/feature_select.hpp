#pragma once

#include "featimp/data_matrix.hpp"
#include "featimp/error.hpp"

#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace featimp {

struct IgScore {
  std::string feature;
  double gain = 0.0;  // bits
};

/// Shannon entropy in bits of a discrete sequence.
template <typename Label>
double entropy(std::span<const Label> labels) {
  if (labels.empty()) throw ContractError("entropy of an empty sequence");
  std::map<Label, std::size_t> counts;
  for (const auto& l : labels) ++counts[l];
  const double n = static_cast<double>(labels.size());
  double h = 0.0;
  for (const auto& [label, c] : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

/// Discrete level per value. With at most `bins` distinct values each value
/// is its own level; otherwise values go to equal-frequency bins by rank,
/// with ties always sharing a bin.
std::vector<int> discretize(std::span<const double> values, std::size_t bins);

/// H(class) - H(class | feature) over paired, fully observed values. Both
/// sequences are discretized with `discretize(.., bins)`.
double information_gain(std::span<const double> feature, std::span<const double> klass, std::size_t bins);

/// Gain of column `feature` about column `klass`, over rows where both are
/// observed.
IgScore information_gain(const DataMatrix& m, std::size_t feature, std::size_t klass, std::size_t bins = 5);

/// Gain of every feature-role column, in column order.
std::vector<IgScore> score_features(const DataMatrix& m, std::string_view class_column, std::size_t bins = 5);

/// The k highest-gain features, descending; equal gains keep input order.
std::vector<IgScore> top_k(std::vector<IgScore> scores, std::size_t k);

}  // namespace featimp
