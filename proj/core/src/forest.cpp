#include "featimp/forest.hpp"

#include "featimp/error.hpp"
#include "featimp/random.hpp"

#include <algorithm>
#include <numeric>

namespace featimp {

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  std::size_t left_count = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const Vector& y, const TreeConfig& cfg, Rng& rng,
              std::vector<RegressionTree::Node>& nodes)
      : x_(x), y_(y), cfg_(cfg), rng_(rng), nodes_(nodes) {
    features_.resize(static_cast<std::size_t>(x.cols()));
    std::iota(features_.begin(), features_.end(), 0);
  }

  int build(std::vector<Eigen::Index>& idx, std::size_t begin, std::size_t end, std::size_t depth) {
    const auto node_id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double sum = 0.0;
    for (auto k = begin; k < end; ++k) sum += y_(idx[k]);
    const auto count = end - begin;
    nodes_[static_cast<std::size_t>(node_id)].value = sum / static_cast<double>(count);

    if (count <= cfg_.min_node || (cfg_.max_depth && depth >= cfg_.max_depth)) return node_id;
    const auto split = best_split(idx, begin, end, sum);
    if (split.feature < 0) return node_id;

    auto mid = std::partition(idx.begin() + static_cast<std::ptrdiff_t>(begin),
                              idx.begin() + static_cast<std::ptrdiff_t>(end),
                              [&](Eigen::Index r) { return x_(r, split.feature) <= split.threshold; });
    const auto m = static_cast<std::size_t>(mid - idx.begin());
    const int left = build(idx, begin, m, depth + 1);
    const int right = build(idx, m, end, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(node_id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return node_id;
  }

 private:
  Split best_split(const std::vector<Eigen::Index>& idx, std::size_t begin, std::size_t end, double sum) {
    const auto count = end - begin;
    // Partial Fisher-Yates: the first mtry entries become the candidates.
    const auto p = features_.size();
    for (std::size_t k = 0; k < cfg_.mtry; ++k) {
      const auto pick = k + static_cast<std::size_t>(rng_.index(p - k));
      std::swap(features_[k], features_[pick]);
    }
    Split best;
    const double parent = sum * sum / static_cast<double>(count);
    pairs_.resize(count);
    for (std::size_t f = 0; f < cfg_.mtry; ++f) {
      const auto feat = features_[f];
      for (std::size_t k = 0; k < count; ++k) {
        const auto r = idx[begin + k];
        pairs_[k] = {x_(r, feat), y_(r)};
      }
      std::sort(pairs_.begin(), pairs_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      double left_sum = 0.0;
      for (std::size_t k = 0; k + 1 < count; ++k) {
        left_sum += pairs_[k].second;
        if (pairs_[k].first == pairs_[k + 1].first) continue;
        const double nl = static_cast<double>(k + 1);
        const double nr = static_cast<double>(count - k - 1);
        const double right_sum = sum - left_sum;
        const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent;
        if (gain > best.gain + 1e-12 * std::abs(parent)) {
          best.gain = gain;
          best.feature = static_cast<int>(feat);
          best.threshold = 0.5 * (pairs_[k].first + pairs_[k + 1].first);
          best.left_count = k + 1;
        }
      }
    }
    return best;
  }

  const Matrix& x_;
  const Vector& y_;
  const TreeConfig& cfg_;
  Rng& rng_;
  std::vector<RegressionTree::Node>& nodes_;
  std::vector<std::size_t> features_;
  std::vector<std::pair<double, double>> pairs_;
};

}  // namespace

void RegressionTree::fit(const Matrix& x, const Vector& y, const std::vector<Eigen::Index>& sample,
                         const TreeConfig& cfg, std::uint64_t seed) {
  if (sample.empty()) throw ContractError("RegressionTree: empty sample");
  if (cfg.mtry < 1 || cfg.mtry > static_cast<std::size_t>(x.cols())) {
    throw ContractError("RegressionTree: mtry must lie in [1, #predictors]");
  }
  nodes_.clear();
  Rng rng(seed);
  auto idx = sample;
  TreeBuilder builder(x, y, cfg, rng, nodes_);
  builder.build(idx, 0, idx.size(), 0);
}

double RegressionTree::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  std::size_t k = 0;
  while (nodes_[k].feature >= 0) {
    const auto& n = nodes_[k];
    k = static_cast<std::size_t>(row(n.feature) <= n.threshold ? n.left : n.right);
  }
  return nodes_[k].value;
}

void RegressionForest::fit(const Matrix& x, const Vector& y, std::size_t n_trees, const TreeConfig& cfg,
                           std::uint64_t seed) {
  if (n_trees < 1) throw ContractError("RegressionForest: need at least one tree");
  if (x.rows() != y.size() || x.rows() < 1) throw ContractError("RegressionForest: bad training shapes");
  Rng seeds(seed);
  trees_.assign(n_trees, {});
  const auto n = static_cast<std::uint64_t>(x.rows());
  std::vector<Eigen::Index> sample(static_cast<std::size_t>(n));
  for (auto& tree : trees_) {
    const auto tree_seed = seeds.next();
    Rng boot(tree_seed);
    for (auto& s : sample) s = static_cast<Eigen::Index>(boot.index(n));
    tree.fit(x, y, sample, cfg, boot.next());
  }
}

double RegressionForest::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  double s = 0.0;
  for (const auto& t : trees_) s += t.predict(row);
  return s / static_cast<double>(trees_.size());
}

Vector RegressionForest::predict_rows(const Matrix& x) const {
  Vector out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict(x.row(i));
  return out;
}

}  // namespace featimp
