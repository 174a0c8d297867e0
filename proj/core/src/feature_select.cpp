#include "featimp/feature_select.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace featimp {

std::vector<int> discretize(std::span<const double> values, std::size_t bins) {
  if (bins == 0) throw ContractError("discretize: bins must be positive");
  const std::set<double> distinct(values.begin(), values.end());
  std::vector<int> out(values.size());
  if (distinct.size() <= bins) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out[i] = static_cast<int>(std::distance(distinct.begin(), distinct.find(values[i])));
    }
    return out;
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto below = static_cast<std::size_t>(
        std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin());
    out[i] = static_cast<int>(bins * below / n);
  }
  return out;
}

double information_gain(std::span<const double> feature, std::span<const double> klass, std::size_t bins) {
  if (feature.size() != klass.size()) throw ContractError("information_gain: length mismatch");
  if (feature.empty()) throw ContractError("information_gain: no jointly observed rows");
  const auto f = discretize(feature, bins);
  const auto c = discretize(klass, bins);

  const double h_class = entropy(std::span<const int>(c));
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < f.size(); ++i) groups[f[i]].push_back(c[i]);
  double h_cond = 0.0;
  const double n = static_cast<double>(f.size());
  for (const auto& [level, members] : groups) {
    h_cond += static_cast<double>(members.size()) / n * entropy(std::span<const int>(members));
  }
  return std::clamp(h_class - h_cond, 0.0, h_class);
}

IgScore information_gain(const DataMatrix& m, std::size_t feature, std::size_t klass, std::size_t bins) {
  std::vector<double> f, c;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m.is_observed(i, feature) && m.is_observed(i, klass)) {
      f.push_back(m.value(i, feature));
      c.push_back(m.value(i, klass));
    }
  }
  if (f.empty()) {
    throw OverlapError("feature '" + m.column(feature).name + "' has no rows observed jointly with class '" +
                       m.column(klass).name + "'");
  }
  return {m.column(feature).name, information_gain(f, c, bins)};
}

std::vector<IgScore> score_features(const DataMatrix& m, std::string_view class_column, std::size_t bins) {
  const auto klass = m.index_of(class_column);
  std::vector<IgScore> out;
  for (auto j : m.indices_with_role(Role::feature)) out.push_back(information_gain(m, j, klass, bins));
  return out;
}

std::vector<IgScore> top_k(std::vector<IgScore> scores, std::size_t k) {
  if (k > scores.size()) {
    throw ContractError("top_k: k = " + std::to_string(k) + " exceeds " + std::to_string(scores.size()) +
                        " features");
  }
  std::stable_sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.gain > b.gain; });
  scores.resize(k);
  return scores;
}

}  // namespace featimp
