#pragma once

#include "featimp/data_matrix.hpp"

#include <cstdint>
#include <vector>

namespace featimp {

struct TreeConfig {
  std::size_t mtry = 1;
  /// Nodes with at most this many samples become leaves.
  std::size_t min_node = 5;
  std::size_t max_depth = 0;  // 0 = unlimited
};

/// CART regression tree grown on a bootstrap sample with variance-reduction
/// splits over `mtry` randomly drawn predictors per node.
class RegressionTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };

  void fit(const Matrix& x, const Vector& y, const std::vector<Eigen::Index>& sample, const TreeConfig& cfg,
           std::uint64_t seed);
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  const std::vector<Node>& nodes() const { return nodes_; }

 private:
  std::vector<Node> nodes_;
};

/// Bagged regression trees; each tree draws its own bootstrap sample from a
/// seed derived up front, so the fit does not depend on evaluation order.
class RegressionForest {
 public:
  void fit(const Matrix& x, const Vector& y, std::size_t n_trees, const TreeConfig& cfg, std::uint64_t seed);
  double predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  Vector predict_rows(const Matrix& x) const;
  std::size_t size() const { return trees_.size(); }

 private:
  std::vector<RegressionTree> trees_;
};

}  // namespace featimp
