#include "featimp/pca.hpp"

#include "featimp/error.hpp"
#include "featimp/random.hpp"
#include "featimp/stats.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace featimp {

namespace {

PcaModel empty_model(const DataMatrix& m) {
  PcaModel model;
  for (const auto& c : m.columns()) {
    model.feature_names.push_back(c.name);
    model.feature_roles.push_back(c.role);
  }
  return model;
}

}  // namespace

double PcaModel::pc1(std::string_view feature) const {
  if (loadings.cols() == 0) throw ContractError("PCA model has no components");
  for (std::size_t j = 0; j < feature_names.size(); ++j) {
    if (feature_names[j] == feature) return loadings(static_cast<Eigen::Index>(j), 0);
  }
  throw SchemaError("feature '" + std::string(feature) + "' is not in the PCA model");
}

Matrix PcaModel::reconstruct(std::size_t k) const {
  const auto kk = static_cast<Eigen::Index>(std::min(k, components()));
  return scores.leftCols(kk) * loadings.leftCols(kk).transpose();
}

void apply_sign_convention(Matrix& loadings, Matrix& scores) {
  for (Eigen::Index c = 0; c < loadings.cols(); ++c) {
    Eigen::Index arg = 0;
    for (Eigen::Index j = 1; j < loadings.rows(); ++j) {
      if (std::abs(loadings(j, c)) > std::abs(loadings(arg, c))) arg = j;
    }
    if (loadings(arg, c) < 0.0) {
      loadings.col(c) *= -1.0;
      if (c < scores.cols()) scores.col(c) *= -1.0;
    }
  }
}

PcaModel pca_correlation(const DataMatrix& m, std::size_t k) {
  if (!m.complete()) throw ContractError("pca_correlation requires complete data");
  if (m.cols() < 1) throw ContractError("pca_correlation requires at least one column");
  const auto z = standardize(m);
  const auto p = static_cast<Eigen::Index>(m.cols());
  const double dof = static_cast<double>(m.rows() - 1);
  const Matrix corr = z.values().transpose() * z.values() / dof;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(corr);
  if (eig.info() != Eigen::Success) throw ConvergenceError("correlation eigendecomposition failed");

  // Descending eigenvalue; equal eigenvalues keep the solver's column order.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = eig.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return ev(a) > ev(b); });

  const auto kk = static_cast<Eigen::Index>(k == 0 ? m.cols() : std::min(k, m.cols()));
  auto model = empty_model(m);
  model.loadings.resize(p, kk);
  model.explained.resize(kk);
  for (Eigen::Index c = 0; c < kk; ++c) {
    model.loadings.col(c) = eig.eigenvectors().col(order[static_cast<std::size_t>(c)]);
    model.explained(c) = std::max(0.0, ev(order[static_cast<std::size_t>(c)])) / static_cast<double>(p);
  }
  model.scores = z.values() * model.loadings;
  apply_sign_convention(model.loadings, model.scores);
  return model;
}

PcaModel nipals(const DataMatrix& m, const NipalsConfig& cfg) {
  if (!(cfg.tol > 0.0)) throw ContractError("NIPALS tol must be positive");
  if (cfg.max_iter < 1) throw ContractError("NIPALS max_iter must be at least 1");
  const auto n = static_cast<Eigen::Index>(m.rows());
  const auto p = static_cast<Eigen::Index>(m.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!m.observed().row(i).any()) throw ContractError("NIPALS: row " + std::to_string(i) + " is empty");
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!m.observed().col(j).any()) {
      throw ContractError("NIPALS: column '" + m.column(static_cast<std::size_t>(j)).name + "' is empty");
    }
  }

  const Matrix w = m.observed().cast<double>();
  Matrix x = m.observed().select(m.values(), 0.0);
  const double total_ss = x.squaredNorm();
  const auto max_k = std::min(n, p);
  const auto want = cfg.k == 0 ? max_k : std::min<Eigen::Index>(static_cast<Eigen::Index>(cfg.k), max_k);

  auto model = empty_model(m);
  std::vector<Vector> ts, ps;
  std::vector<double> shares;

  for (Eigen::Index c = 0; c < want; ++c) {
    const double residual_ss = x.squaredNorm();
    if (total_ss == 0.0 || residual_ss <= 1e-20 * total_ss) break;

    Eigen::Index start = 0;
    x.colwise().squaredNorm().maxCoeff(&start);
    Vector t = x.col(start);
    Vector loading(p);
    double delta = std::numeric_limits<double>::infinity();
    int iter = 0;
    while (iter < cfg.max_iter) {
      ++iter;
      const Vector t2 = t.cwiseProduct(t);
      const Vector pden = w.transpose() * t2;
      const Vector pnum = x.transpose() * t;
      for (Eigen::Index j = 0; j < p; ++j) loading(j) = pden(j) > 0.0 ? pnum(j) / pden(j) : 0.0;
      const double norm = loading.norm();
      if (norm == 0.0) throw ConvergenceError("NIPALS component " + std::to_string(c + 1) + ": zero loading");
      loading /= norm;

      const Vector p2 = loading.cwiseProduct(loading);
      const Vector tden = w * p2;
      const Vector tnum = x * loading;
      Vector t_new(n);
      for (Eigen::Index i = 0; i < n; ++i) t_new(i) = tden(i) > 0.0 ? tnum(i) / tden(i) : 0.0;

      const double tn = t_new.norm();
      delta = tn > 0.0 ? (t_new - t).norm() / tn : 0.0;
      t = std::move(t_new);
      if (delta < cfg.tol) break;
    }
    if (cfg.require_convergence && !(delta < cfg.tol)) {
      throw ConvergenceError("NIPALS component " + std::to_string(c + 1) + " did not converge in " +
                             std::to_string(cfg.max_iter) + " iterations (final delta " +
                             std::to_string(delta) + ")");
    }

    x -= w.cwiseProduct(t * loading.transpose());
    shares.push_back((residual_ss - x.squaredNorm()) / total_ss);
    ts.push_back(std::move(t));
    ps.push_back(std::move(loading));
    model.iterations.push_back(iter);
    model.final_delta.push_back(delta);
  }

  const auto k = static_cast<Eigen::Index>(ts.size());
  model.loadings.resize(p, k);
  model.scores.resize(n, k);
  model.explained.resize(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    model.loadings.col(c) = ps[static_cast<std::size_t>(c)];
    model.scores.col(c) = ts[static_cast<std::size_t>(c)];
    model.explained(c) = shares[static_cast<std::size_t>(c)];
  }
  apply_sign_convention(model.loadings, model.scores);
  return model;
}

std::size_t estimate_k(const DataMatrix& m, std::size_t k_max, std::size_t folds, std::uint64_t seed,
                       const NipalsConfig& cfg) {
  if (k_max < 1 || k_max > m.cols()) throw ContractError("estimate_k: k_max must lie in [1, #columns]");
  if (folds < 2) throw ContractError("estimate_k: folds must be at least 2");
  if (k_max == 1) return 1;

  const auto z = standardize(m);
  const auto n = static_cast<Eigen::Index>(m.rows());
  const auto p = static_cast<Eigen::Index>(m.cols());

  std::vector<std::pair<Eigen::Index, Eigen::Index>> cells;
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (z.observed()(i, j)) cells.emplace_back(i, j);
    }
  }
  Rng rng(seed);
  rng.shuffle(std::span(cells));
  Eigen::ArrayXXi fold = Eigen::ArrayXXi::Constant(n, p, -1);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    fold(cells[c].first, cells[c].second) = static_cast<int>(c % folds);
  }
  // A row or column whose observed cells all share one fold would be emptied
  // when that fold is held out; pin its first cell to the training side.
  auto pin_if_single_fold = [&](auto&& cells_of) {
    int first = -2;
    bool single = true;
    Eigen::Index pin_i = -1, pin_j = -1;
    for (auto [i, j] : cells_of) {
      if (fold(i, j) < 0) continue;
      if (first == -2) {
        first = fold(i, j);
        pin_i = i;
        pin_j = j;
      } else if (fold(i, j) != first) {
        single = false;
      }
    }
    if (first >= 0 && single) fold(pin_i, pin_j) = -1;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> row;
    for (Eigen::Index j = 0; j < p; ++j) row.emplace_back(i, j);
    pin_if_single_fold(row);
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> col;
    for (Eigen::Index i = 0; i < n; ++i) col.emplace_back(i, j);
    pin_if_single_fold(col);
  }

  std::vector<double> sse(k_max, 0.0);
  std::size_t held_total = 0;
  NipalsConfig fold_cfg = cfg;
  fold_cfg.k = k_max;
  for (std::size_t f = 0; f < folds; ++f) {
    const Mask train = z.observed() && (fold != static_cast<int>(f));
    const auto model = nipals(z.with_mask(train), fold_cfg);
    Matrix recon = Matrix::Zero(n, p);
    for (std::size_t k = 1; k <= k_max; ++k) {
      if (k <= model.components()) {
        const auto c = static_cast<Eigen::Index>(k - 1);
        recon += model.scores.col(c) * model.loadings.col(c).transpose();
      }
      for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
          if (fold(i, j) == static_cast<int>(f)) {
            const double e = z.value(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) - recon(i, j);
            sse[k - 1] += e * e;
          }
        }
      }
    }
    held_total += static_cast<std::size_t>((fold == static_cast<int>(f)).count());
  }
  if (held_total == 0) throw ContractError("estimate_k: no held-out cells");

  std::size_t best = 1;
  for (std::size_t k = 2; k <= k_max; ++k) {
    if (sse[k - 1] < sse[best - 1]) best = k;
  }
  return best;
}

}  // namespace featimp
