#include "featimp/error.hpp"
#include "featimp/evaluation.hpp"
#include "featimp/imputers.hpp"
#include "featimp/random.hpp"
#include "featimp/stats.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <set>

using namespace featimp;
using featimp::testing::columns;
using featimp::testing::features;
using featimp::testing::NA;
using featimp::testing::numbered_features;

namespace {

/// Two-factor data: `p` features, a complete class column and a complete
/// demographic column; features masked MCAR at `rate`, every row keeps at
/// least one observed feature and every feature keeps at least `p + 4`
/// observed rows.
DataMatrix random_masked(std::size_t n, std::size_t p, double rate, std::uint64_t seed) {
  Rng rng(seed);
  Matrix load(p + 2, 2);
  for (Eigen::Index j = 0; j < load.rows(); ++j) load(j, 0) = 0.4 + 0.5 * rng.uniform(), load(j, 1) = rng.normal() * 0.4;
  Matrix v(n, p + 2);
  Mask obs = Mask::Constant(n, p + 2, true);
  for (std::size_t i = 0; i < n; ++i) {
    const double f1 = rng.normal(), f2 = rng.normal();
    for (std::size_t j = 0; j < p + 2; ++j) v(i, j) = load(j, 0) * f1 + load(j, 1) * f2 + 0.6 * rng.normal();
    for (std::size_t j = 0; j < p; ++j) obs(i, j) = rng.uniform() >= rate;
    if (!obs.row(i).head(p).any()) obs(i, rng.index(p)) = true;
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; obs.col(j).count() < static_cast<Eigen::Index>(p + 4); ++i) obs(i, j) = true;
  }
  auto info = numbered_features(p);
  info.push_back({"cls", Role::class_label});
  info.push_back({"age", Role::demographic});
  return DataMatrix(std::move(info), std::move(v), std::move(obs));
}

PmmConfig small_pmm() {
  PmmConfig c;
  c.m = 3;
  c.cycles = 3;
  return c;
}

ForestConfig small_forest() {
  ForestConfig c;
  c.n_trees = 15;
  c.max_rounds = 4;
  return c;
}

NipalsImputeConfig nipals_cfg(std::size_t k) {
  NipalsImputeConfig c;
  c.k = k;
  c.require_convergence = false;
  return c;
}

using Imputer = std::function<ImputationResult(const DataMatrix&, std::uint64_t)>;

std::vector<std::pair<std::string, Imputer>> all_imputers() {
  PpcaConfig ppca;
  ppca.k = 2;
  return {
      {"mean", [](const DataMatrix& m, std::uint64_t) { return impute_mean(m); }},
      {"median", [](const DataMatrix& m, std::uint64_t) { return impute_median(m); }},
      {"pmm", [](const DataMatrix& m, std::uint64_t s) { return impute_pmm(m, small_pmm(), s); }},
      {"missforest", [](const DataMatrix& m, std::uint64_t s) { return impute_missforest(m, small_forest(), s); }},
      {"ppca", [ppca](const DataMatrix& m, std::uint64_t s) { return impute_ppca(m, ppca, s); }},
      {"nipals", [](const DataMatrix& m, std::uint64_t) { return impute_nipals(m, nipals_cfg(2)); }},
  };
}

double subspace_angle_deg(const Matrix& a, const Matrix& b) {
  const Matrix qa = Eigen::HouseholderQR<Matrix>(a).householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix qb = Eigen::HouseholderQR<Matrix>(b).householderQ() * Matrix::Identity(b.rows(), b.cols());
  Eigen::JacobiSVD<Matrix> svd(qa.transpose() * qb);
  const double smallest = std::clamp(svd.singularValues().minCoeff(), 0.0, 1.0);
  return std::acos(smallest) * 180.0 / std::numbers::pi;
}

}  // namespace

TEST(ImputeMean, Examples) {
  const auto r = impute_mean(columns(features({"a"}), {{1, NA, 3}}));
  EXPECT_DOUBLE_EQ(r.completed.value(1, 0), 2.0);
  EXPECT_TRUE(r.completed.complete());
  EXPECT_EQ(r.method, "mean");

  const auto zero = impute_mean(columns(features({"a"}), {{-1, 1, NA, NA}}));
  EXPECT_DOUBLE_EQ(zero.completed.value(2, 0), 0.0);
  EXPECT_DOUBLE_EQ(zero.completed.value(3, 0), 0.0);

  const auto full = columns(features({"a", "b"}), {{1, 2}, {3, 4}});
  EXPECT_EQ(impute_mean(full).completed, full);
}

TEST(ImputeMean, Errors) {
  EXPECT_THROW(impute_mean(columns(features({"a", "b"}), {{NA, NA}, {1, 2}})), DegenerateColumnError);
  auto info = features({"a"});
  info.push_back({"cls", Role::class_label});
  EXPECT_THROW(impute_mean(columns(info, {{1, 2, NA}, {1, NA, 2}})), ContractError);
}

TEST(ImputeMedian, Examples) {
  EXPECT_DOUBLE_EQ(impute_median(columns(features({"a"}), {{1, 2, 100, NA}})).completed.value(3, 0), 2.0);
  EXPECT_DOUBLE_EQ(impute_median(columns(features({"a"}), {{1, 3, NA}})).completed.value(2, 0), 2.0);
}

TEST(ImputeMedian, SymmetricDataNearMean) {
  Rng rng(1);
  std::vector<double> col(4001);
  for (std::size_t i = 0; i < 4000; ++i) col[i] = rng.normal(5.0, 2.0);
  col[4000] = NA;
  const auto m = columns(features({"a"}), {col});
  EXPECT_NEAR(impute_median(m).completed.value(4000, 0), impute_mean(m).completed.value(4000, 0), 0.1);
}

TEST(AllImputers, ContractOnRandomData) {
  for (const auto& [name, run] : all_imputers()) {
    for (std::uint64_t trial = 0; trial < 5; ++trial) {
      const auto m = random_masked(60, 5, 0.3, 1000 + trial);
      const auto a = run(m, 77);
      const auto b = run(m, 77);
      ASSERT_TRUE(a.completed.complete()) << name;
      ASSERT_EQ(a.completed.names(), m.names()) << name;
      for (std::size_t j = 0; j < m.cols(); ++j) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
          if (m.is_observed(i, j)) {
            ASSERT_EQ(a.completed.value(i, j), m.value(i, j)) << name;
          } else {
            ASSERT_TRUE(std::isfinite(a.completed.value(i, j))) << name;
          }
        }
      }
      EXPECT_EQ(a.completed.values(), b.completed.values()) << name;
    }
  }
}

TEST(AllImputers, ClassColumnCanBeExcluded) {
  const auto m = random_masked(80, 4, 0.3, 5);
  Matrix other = m.values();
  const auto cls = static_cast<Eigen::Index>(m.index_of("cls"));
  Rng rng(6);
  for (Eigen::Index i = 0; i < other.rows(); ++i) other(i, cls) = rng.normal();
  const auto m2 = m.with_values(other);

  PmmConfig pmm = small_pmm();
  pmm.predictors.use_class = false;
  ForestConfig forest = small_forest();
  forest.predictors.use_class = false;
  PpcaConfig ppca;
  ppca.k = 2;
  ppca.predictors.use_class = false;
  NipalsImputeConfig nip = nipals_cfg(2);
  nip.predictors.use_class = false;

  auto features_of = [&](const ImputationResult& r) { return Matrix(r.completed.values().leftCols(4)); };
  EXPECT_EQ(features_of(impute_pmm(m, pmm, 1)), features_of(impute_pmm(m2, pmm, 1)));
  EXPECT_EQ(features_of(impute_missforest(m, forest, 1)), features_of(impute_missforest(m2, forest, 1)));
  EXPECT_EQ(features_of(impute_ppca(m, ppca, 1)), features_of(impute_ppca(m2, ppca, 1)));
  EXPECT_EQ(features_of(impute_nipals(m, nip)), features_of(impute_nipals(m2, nip)));

  pmm.predictors.use_class = true;
  EXPECT_NE(features_of(impute_pmm(m, pmm, 1)), features_of(impute_pmm(m2, pmm, 1)));
}

TEST(ImputePmm, DonorSupportOnRandomRuns) {
  for (std::uint64_t trial = 0; trial < 25; ++trial) {
    const auto m = random_masked(50, 4, 0.35, 2000 + trial);
    PmmConfig cfg = small_pmm();
    cfg.donors = 1 + trial % 5;
    for (const auto& single : pmm_imputations(m, cfg, trial)) {
      for (std::size_t j = 0; j < 4; ++j) {
        const auto observed = m.observed_values(j);
        const std::set<double> support(observed.begin(), observed.end());
        for (std::size_t i = 0; i < m.rows(); ++i) {
          if (!m.is_observed(i, j)) ASSERT_TRUE(support.count(single.value(i, j))) << trial;
        }
      }
    }
  }
}

TEST(ImputePmm, ExactLinearCopiesNearestDonor) {
  Rng rng(7);
  const std::size_t n = 40;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.uniform() * 10.0;
    y[i] = 2.0 * x[i];
  }
  auto ym = y;
  for (std::size_t i = 0; i < n; i += 4) ym[i] = NA;
  auto info = features({"y"});
  info.push_back({"x", Role::demographic});
  const auto m = columns(info, {ym, x});
  PmmConfig cfg;
  cfg.m = 1;
  cfg.donors = 1;
  cfg.cycles = 2;
  const auto single = pmm_imputations(m, cfg, 3).front();
  for (std::size_t i = 0; i < n; i += 4) {
    std::size_t best = n;
    for (std::size_t d = 0; d < n; ++d) {
      if (d % 4 == 0) continue;
      if (best == n || std::abs(x[d] - x[i]) < std::abs(x[best] - x[i])) best = d;
    }
    EXPECT_DOUBLE_EQ(single.value(i, 0), y[best]) << i;
  }
}

TEST(ImputePmm, ResultIsMeanOfSingleImputations) {
  const auto m = random_masked(60, 4, 0.3, 8);
  PmmConfig cfg;
  cfg.m = 15;
  cfg.cycles = 2;
  const auto singles = pmm_imputations(m, cfg, 9);
  ASSERT_EQ(singles.size(), 15u);
  const auto pooled = impute_pmm(m, cfg, 9);
  Matrix sum = Matrix::Zero(m.rows(), m.cols());
  for (const auto& s : singles) sum += s.values();
  for (std::size_t j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (!m.is_observed(i, j)) EXPECT_NEAR(pooled.completed.value(i, j), sum(i, j) / 15.0, 1e-12);
    }
  }
}

TEST(ImputePmm, BadConfig) {
  const auto m = random_masked(30, 3, 0.2, 10);
  PmmConfig cfg;
  cfg.m = 0;
  EXPECT_THROW(impute_pmm(m, cfg, 1), ContractError);
  cfg.m = 1;
  cfg.donors = 1000;
  EXPECT_THROW(impute_pmm(m, cfg, 1), ContractError);
}

TEST(ImputeMissForest, DuplicateColumnIsRecovered) {
  Rng rng(11);
  const std::size_t n = 500;
  std::vector<double> a(n), b(n), noise(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.normal();
    noise[i] = rng.normal();
    b[i] = rng.uniform() < 0.2 ? NA : a[i];
  }
  auto info = features({"copy", "noise"});
  info.push_back({"source", Role::demographic});
  const auto m = columns(info, {b, noise, a});
  const auto truth = columns(info, {a, noise, a});
  const auto r = impute_missforest(m, ForestConfig{}, 12);
  const auto scores = per_feature_r2(r.completed, truth, m);
  ASSERT_EQ(scores.size(), 1u);
  EXPECT_GE(scores[0].second, 0.95);
}

TEST(ImputeMissForest, IndependentNoiseColumnScoresNearZero) {
  Rng rng(13);
  const std::size_t n = 500;
  std::vector<double> a(n), noise(n), masked(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = rng.normal();
    noise[i] = rng.normal();
    masked[i] = rng.uniform() < 0.3 ? NA : noise[i];
  }
  auto info = features({"noise"});
  info.push_back({"a", Role::demographic});
  const auto m = columns(info, {masked, a});
  const auto r = impute_missforest(m, ForestConfig{}, 14);
  const auto scores = per_feature_r2(r.completed, columns(info, {noise, a}), m);
  EXPECT_LT(scores.at(0).second, 0.1);
}

TEST(ImputeMissForest, ReturnsSweepBeforeStoppingRuleFired) {
  int checked = 0;
  for (std::uint64_t trial = 0; trial < 6; ++trial) {
    const auto m = random_masked(80, 5, 0.3, 3000 + trial);
    ForestConfig cfg = small_forest();
    cfg.max_rounds = 10;
    const auto r = impute_missforest(m, cfg, trial);
    if (!r.diagnostics.converged) continue;
    ASSERT_GE(r.diagnostics.iterations, 2);
    const auto& tr = r.diagnostics.trace;
    EXPECT_GE(tr.back(), tr[tr.size() - 2]);
    for (std::size_t t = 1; t + 1 < tr.size(); ++t) EXPECT_LT(tr[t], tr[t - 1]);
    cfg.max_rounds = static_cast<std::size_t>(r.diagnostics.iterations - 1);
    const auto earlier = impute_missforest(m, cfg, trial);
    EXPECT_EQ(earlier.completed.values(), r.completed.values());
    ++checked;
  }
  EXPECT_GT(checked, 0);
}

TEST(ImputeMissForest, Errors) {
  const auto m = random_masked(30, 3, 0.2, 15);
  ForestConfig cfg;
  cfg.n_trees = 0;
  EXPECT_THROW(impute_missforest(m, cfg, 1), ContractError);
  cfg.n_trees = 5;
  cfg.mtry = 99;
  EXPECT_THROW(impute_missforest(m, cfg, 1), ContractError);
  EXPECT_THROW(impute_missforest(columns(features({"a", "b"}), {{1, 1, NA, 1}, {2, 2, 2, 2}}), ForestConfig{}, 1),
               DegenerateColumnError);
}

TEST(ImputePpca, RecoversGeneratingSubspace) {
  Rng rng(16);
  const std::size_t n = 1000, p = 6;
  Matrix w(p, 2);
  for (std::size_t j = 0; j < p; ++j) {
    const double angle = std::numbers::pi * static_cast<double>(j) / static_cast<double>(p);
    w(j, 0) = 0.9 * std::cos(angle);
    w(j, 1) = 0.9 * std::sin(angle);
  }
  Matrix v(n, p);
  Mask obs(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    Vector z(2);
    z << rng.normal(), rng.normal();
    for (std::size_t j = 0; j < p; ++j) {
      v(i, j) = w.row(j).dot(z) + 0.5 * rng.normal();
      obs(i, j) = rng.uniform() >= 0.3;
    }
    if (!obs.row(i).any()) obs(i, 0) = true;
  }
  const DataMatrix m(numbered_features(p), v, obs);
  PpcaConfig cfg;
  cfg.k = 2;
  const auto r = impute_ppca(m, cfg, 1);
  // Equal row norms of W make the standardized covariance's top-2 span equal span(W).
  const Matrix z = standardize(r.completed).values();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(z.transpose() * z);
  EXPECT_LT(subspace_angle_deg(eig.eigenvectors().rightCols(2), w), 5.0);
}

TEST(ImputePpca, LogLikelihoodNeverDecreases) {
  for (std::uint64_t trial = 0; trial < 30; ++trial) {
    const auto m = random_masked(70, 5, 0.15 + 0.01 * static_cast<double>(trial), 4000 + trial);
    PpcaConfig cfg;
    cfg.k = 1 + trial % 3;
    const auto r = impute_ppca(m, cfg, trial);
    const auto& tr = r.diagnostics.trace;
    ASSERT_GE(tr.size(), 2u);
    for (std::size_t t = 1; t < tr.size(); ++t) EXPECT_GE(tr[t], tr[t - 1] - 1e-8) << trial << ' ' << t;
  }
}

TEST(ImputePpca, NoiselessRankOneHitsFloorAndStaysFinite) {
  Rng rng(17);
  Matrix v(50, 4);
  Mask obs = Mask::Constant(50, 4, true);
  for (int i = 0; i < 50; ++i) {
    const double t = rng.normal();
    for (int j = 0; j < 4; ++j) v(i, j) = t * (j + 1);
    obs(i, i % 4) = i >= 40;
  }
  PpcaConfig cfg;
  cfg.k = 1;
  const auto r = impute_ppca(DataMatrix(numbered_features(4), v, obs), cfg, 1);
  EXPECT_TRUE(r.completed.values().allFinite());
  EXPECT_EQ(r.diagnostics.stop_reason, "noise variance reached floor");
}

TEST(ImputePpca, KOutOfRange) {
  const auto m = random_masked(30, 3, 0.2, 18);
  PpcaConfig cfg;
  cfg.k = 0;
  EXPECT_THROW(impute_ppca(m, cfg, 1), ContractError);
  cfg.k = m.cols();
  EXPECT_THROW(impute_ppca(m, cfg, 1), ContractError);
}

TEST(ImputeNipals, ExactRankOneIsRecovered) {
  // Rows come in (t, -t) pairs sharing one mask pattern, so observed column
  // means are exactly zero and standardization keeps the data rank one.
  Rng rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t half = 30, p = 5;
    Vector dir(p);
    for (std::size_t j = 0; j < p; ++j) dir(j) = 0.5 + rng.uniform();
    Matrix v(2 * half, p);
    Mask obs(2 * half, p);
    for (std::size_t i = 0; i < half; ++i) {
      const double t = rng.normal();
      for (std::size_t j = 0; j < p; ++j) {
        v(2 * i, j) = t * dir(j);
        v(2 * i + 1, j) = -t * dir(j);
        obs(2 * i, j) = obs(2 * i + 1, j) = rng.uniform() >= 0.3;
      }
      if (!obs.row(2 * i).any()) obs(2 * i, 0) = obs(2 * i + 1, 0) = true;
    }
    const DataMatrix m(numbered_features(p), v, obs);
    NipalsImputeConfig cfg;
    cfg.k = 1;
    const auto r = impute_nipals(m, cfg);
    EXPECT_LT((r.completed.values() - v).cwiseAbs().maxCoeff(), 1e-6) << trial;
  }
}

TEST(ImputeNipals, ZeroComponentsIsMeanImputation) {
  const auto m = random_masked(40, 4, 0.3, 20);
  const auto a = impute_nipals(m, nipals_cfg(0));
  const auto b = impute_mean(m);
  EXPECT_LT((a.completed.values() - b.completed.values()).cwiseAbs().maxCoeff(), 1e-12);
}
