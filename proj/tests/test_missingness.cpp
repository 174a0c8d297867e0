#include "featimp/error.hpp"
#include "featimp/missingness.hpp"
#include "featimp/random.hpp"
#include "featimp/stats.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <cmath>

using namespace featimp;

namespace {

// driver ~ N(25, 3); f1 = -driver + noise, f2 independent; one class and one
// demographic column.
DataMatrix clinic(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix v(n, 5);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = rng.normal(25.0, 3.0);
    v(i, 0) = d;
    v(i, 1) = -d + rng.normal();
    v(i, 2) = rng.normal();
    v(i, 3) = rng.normal();
    v(i, 4) = rng.normal(70, 5);
  }
  return DataMatrix({{"mmse", Role::driver}, {"f1", Role::feature}, {"f2", Role::feature},
                     {"cls", Role::class_label}, {"age", Role::demographic}},
                    v);
}

MissingnessSpec default_spec(std::uint64_t seed = 1) {
  MissingnessSpec s;
  s.driver = "mmse";
  s.seed = seed;
  return s;
}

}  // namespace

TEST(CellProbability, FormulaAndClamp) {
  MissingnessSpec s;
  EXPECT_DOUBLE_EQ(cell_probability(s, 0.0), 0.48);
  EXPECT_NEAR(cell_probability(s, -2.0), 0.60, 1e-15);
  s.base_rate = 0.99;
  EXPECT_DOUBLE_EQ(cell_probability(s, -3.0), 1.0);
  s.base_rate = 0.01;
  EXPECT_DOUBLE_EQ(cell_probability(s, 3.0), 0.0);
}

TEST(ScaledDriver, ZscoreAndMinmax) {
  const auto m = featimp::testing::columns({{"d", Role::driver}, {"f", Role::feature}}, {{1, 2, 3}, {0, 0, 0}});
  auto s = default_spec();
  s.driver = "d";
  EXPECT_EQ(scaled_driver(m, s), (std::vector<double>{-1, 0, 1}));
  s.scaling = DriverScaling::minmax;
  EXPECT_EQ(scaled_driver(m, s), (std::vector<double>{0, 0.5, 1}));
}

TEST(Inject, ZeroAndFullRates) {
  const auto m = clinic(200, 1);
  auto s = default_spec();
  s.slope = 0.0;
  s.base_rate = 0.0;
  EXPECT_EQ(inject(m, s).data.missing_count(), 0u);
  s.base_rate = 1.0;
  const auto all = inject(m, s);
  EXPECT_EQ(all.data.missing_count(), 400u);
  EXPECT_DOUBLE_EQ(all.realized_rate, 1.0);
}

TEST(Inject, OnlyFeatureTargetsReceiveMissingness) {
  const auto out = inject(clinic(500, 2), default_spec());
  for (const char* keep : {"mmse", "cls", "age"}) {
    EXPECT_EQ(out.data.observed_count(out.data.index_of(keep)), 500u) << keep;
  }
  EXPECT_LT(out.data.observed_count(1), 500u);
  EXPECT_EQ(out.truth, clinic(500, 2));
}

TEST(Inject, ObservedCellsKeepTheirValues) {
  const auto m = clinic(300, 3);
  const auto out = inject(m, default_spec());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (out.data.is_observed(i, j)) ASSERT_EQ(out.data.value(i, j), m.value(i, j));
}

TEST(Inject, ContractErrors) {
  const auto m = clinic(50, 4);
  auto s = default_spec();
  s.targets = {"cls"};
  EXPECT_THROW(inject(m, s), ContractError);
  s.targets = {"f1"};
  const auto once = inject(m, s).data;
  EXPECT_THROW(inject(once, s), ContractError);
  s.driver = "nope";
  EXPECT_THROW(inject(m, s), SchemaError);
}

TEST(Inject, RealizedRateNearBaseAtLargeN) {
  const auto out = inject(clinic(5000, 5), default_spec(42));
  EXPECT_GE(out.realized_rate, 0.46);
  EXPECT_LE(out.realized_rate, 0.50);
}

TEST(Inject, MaskDependsOnlyOnDriver) {
  // Same driver, same seed, different feature values: identical mask.
  const auto a = clinic(400, 6);
  Matrix v = a.values();
  Rng rng(99);
  for (Eigen::Index i = 0; i < v.rows(); ++i) v(i, 1) = rng.normal(0, 50);
  const DataMatrix b(a.columns(), v);
  EXPECT_TRUE((inject(a, default_spec(3)).data.observed() == inject(b, default_spec(3)).data.observed()).all());
}

TEST(Inject, MaskedAndObservedTruthMatchWithinDriverBins) {
  // Mann-Whitney z per driver ventile, combined; values masked at random
  // given the driver should not differ systematically from observed ones.
  const auto m = clinic(20000, 7);
  const auto out = inject(m, default_spec(8));
  const auto d = m.observed_values(0);
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return d[x] < d[y]; });
  double z_sum = 0.0;
  const int bins = 20;
  for (int b = 0; b < bins; ++b) {
    std::vector<double> masked, kept;
    for (auto k = order.size() * b / bins; k < order.size() * (b + 1) / bins; ++k) {
      const auto i = order[k];
      (out.data.is_observed(i, 1) ? kept : masked).push_back(m.value(i, 1));
    }
    std::vector<double> all(masked);
    all.insert(all.end(), kept.begin(), kept.end());
    const auto r = average_ranks(all);
    double rank_sum = 0.0;
    for (std::size_t k = 0; k < masked.size(); ++k) rank_sum += r[k];
    const double n1 = static_cast<double>(masked.size()), n2 = static_cast<double>(kept.size());
    const double u = rank_sum - n1 * (n1 + 1) / 2;
    z_sum += (u - n1 * n2 / 2) / std::sqrt(n1 * n2 * (n1 + n2 + 1) / 12);
  }
  EXPECT_LT(std::abs(z_sum / std::sqrt(bins)), 4.0);
}

TEST(Inject, MissingnessFallsAcrossDriverQuintiles) {
  const auto m = clinic(5000, 9);
  const auto out = inject(m, default_spec(10));
  const auto d = m.observed_values(0);
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return d[x] < d[y]; });
  double prev = 2.0;
  for (int q = 0; q < 5; ++q) {
    std::size_t miss = 0, cells = 0;
    for (auto k = order.size() * q / 5; k < order.size() * (q + 1) / 5; ++k) {
      for (std::size_t j : {1u, 2u}) {
        miss += out.data.is_observed(order[k], j) ? 0 : 1;
        ++cells;
      }
    }
    const double rate = static_cast<double>(miss) / static_cast<double>(cells);
    EXPECT_LT(rate, prev) << "quintile " << q;
    prev = rate;
  }
}

TEST(Replicate, SeedsAndDistinctMasks) {
  const auto m = clinic(300, 11);
  const auto reps = replicate(m, default_spec(100), 10);
  ASSERT_EQ(reps.size(), 10u);
  EXPECT_EQ(reps[0].data, inject(m, default_spec(100)).data);
  for (std::size_t a = 0; a < 10; ++a) {
    EXPECT_EQ(reps[a].seed, 100 + a);
    for (std::size_t b = a + 1; b < 10; ++b) EXPECT_FALSE((reps[a].data.observed() == reps[b].data.observed()).all());
  }
  const auto again = replicate(m, default_spec(100), 10);
  for (std::size_t a = 0; a < 10; ++a) EXPECT_EQ(again[a].data, reps[a].data);
}
