#include "featimp/csv_io.hpp"
#include "featimp/data_matrix.hpp"
#include "featimp/error.hpp"
#include "featimp/random.hpp"
#include "featimp/stats.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace featimp;
using featimp::testing::columns;
using featimp::testing::features;
using featimp::testing::NA;

namespace {

DataMatrix random_matrix(Rng& rng, std::size_t n, std::size_t p, double missing) {
  Matrix v(n, p);
  Mask m(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      v(i, j) = rng.normal(3.0 * static_cast<double>(j), 1.0 + static_cast<double>(j));
      m(i, j) = rng.uniform() >= missing;
    }
  return DataMatrix(featimp::testing::numbered_features(p), v, m);
}

}  // namespace

TEST(DataMatrix, MaskedCellsHoldNoValue) {
  const auto m = columns(features({"a", "b"}), {{1, NA, 3}, {4, 5, 6}});
  EXPECT_EQ(m.missing_count(), 1u);
  EXPECT_FALSE(m.is_observed(1, 0));
  EXPECT_TRUE(std::isnan(m.value(1, 0)));
  EXPECT_EQ(m.observed_values(0), (std::vector<double>{1, 3}));
}

TEST(DataMatrix, RejectsDuplicateNamesAndNonFiniteObservedCells) {
  EXPECT_THROW(columns(features({"a", "a"}), {{1, 2}, {3, 4}}), SchemaError);
  Matrix v(2, 1);
  v << 1, std::numeric_limits<double>::infinity();
  EXPECT_THROW(DataMatrix(features({"a"}), v), Error);
}

TEST(DataMatrix, SelectByNameKeepsOrderAndRoles) {
  std::vector<ColumnInfo> info{{"c", Role::class_label}, {"f", Role::feature}, {"d", Role::driver}};
  const auto m = columns(info, {{1, 2}, {3, NA}, {5, 6}});
  const auto s = m.select(std::vector<std::string>{"d", "f"});
  EXPECT_EQ(s.names(), (std::vector<std::string>{"d", "f"}));
  EXPECT_EQ(s.column(0).role, Role::driver);
  EXPECT_FALSE(s.is_observed(1, 1));
  EXPECT_EQ(m.without_roles({Role::driver}).names(), (std::vector<std::string>{"c", "f"}));
  EXPECT_THROW(m.index_of("nope"), SchemaError);
}

TEST(Roles, RoundTripThroughText) {
  for (auto r : {Role::feature, Role::driver, Role::demographic, Role::class_label}) {
    EXPECT_EQ(parse_role(to_string(r)), r);
  }
  EXPECT_EQ(to_string(Role::class_label), "class");
  EXPECT_THROW(parse_role("target"), SchemaError);
}

TEST(Csv, OneNaGivesOneMaskedCell) {
  std::istringstream in("a,b\n1,2\n3,NA\n5,6\n7,8\n");
  const auto m = read_csv(in, {});
  EXPECT_EQ(m.rows(), 4u);
  EXPECT_EQ(m.missing_count(), 1u);
  EXPECT_FALSE(m.is_observed(1, 1));
}

TEST(Csv, EmptyFieldIsMissing) {
  std::istringstream in("a,b\n1,\n,4\n");
  EXPECT_EQ(read_csv(in, {}).missing_count(), 2u);
}

TEST(Csv, BadTokenNamesRowAndColumn) {
  std::istringstream in("a,score\n1,2\n3,abc\n");
  try {
    read_csv(in, {});
    FAIL() << "expected an ingestion error";
  } catch (const IngestionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("score"), std::string::npos) << msg;
    EXPECT_NE(msg.find("abc"), std::string::npos) << msg;
    EXPECT_NE(msg.find('2'), std::string::npos) << msg;
  }
}

TEST(Csv, DuplicateHeaderIsSchemaError) {
  std::istringstream in("a,a\n1,2\n");
  EXPECT_THROW(read_csv(in, {}), SchemaError);
}

TEST(Csv, SchemaColumnMustBePresent) {
  std::istringstream in("a,b\n1,2\n");
  Schema s{{"a", Role::feature}, {"z", Role::class_label}};
  EXPECT_THROW(read_csv(in, s), SchemaError);
}

TEST(Csv, SchemaAssignsRoles) {
  std::istringstream in("a,b,c\n1,2,3\n");
  const auto m = read_csv(in, Schema{{"b", Role::driver}, {"c", Role::class_label}});
  EXPECT_EQ(m.column(0).role, Role::feature);
  EXPECT_EQ(m.column(1).role, Role::driver);
  EXPECT_EQ(m.column(2).role, Role::class_label);
}

TEST(Csv, CustomDelimiterAndToken) {
  std::istringstream in("a;b\n1;?\n2;3\n");
  CsvOptions o;
  o.delimiter = ';';
  o.missing_token = "?";
  EXPECT_EQ(read_csv(in, {}, o).missing_count(), 1u);
}

TEST(Csv, RoundTripIsExact) {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_matrix(rng, 15, 4, 0.3);
    std::stringstream s;
    write_csv(s, m);
    EXPECT_EQ(read_csv(s, schema_of(m)), m);
  }
}

TEST(Csv, SchemaFileRoundTrip) {
  std::vector<ColumnInfo> info{{"c", Role::class_label}, {"f", Role::feature}, {"g", Role::demographic}};
  const auto m = columns(info, {{1}, {2}, {3}});
  std::ostringstream out;
  for (const auto& c : m.columns()) out << c.name << " = " << to_string(c.role) << '\n';
  std::istringstream in("# roles\n" + out.str());
  EXPECT_EQ(read_schema(in), schema_of(m));
}

TEST(Standardize, OneTwoThree) {
  const auto z = standardize(columns(features({"a"}), {{1, 2, 3}}));
  EXPECT_DOUBLE_EQ(z.value(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(z.value(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(z.value(2, 0), 1.0);
}

TEST(Standardize, ConstantColumnNamesIt) {
  try {
    standardize(columns(features({"a", "flat"}), {{1, 2, 3}, {5, 5, 5}}));
    FAIL();
  } catch (const DegenerateColumnError& e) {
    EXPECT_NE(std::string(e.what()).find("flat"), std::string::npos);
  }
}

TEST(Standardize, IdempotentAndMaskPreserving) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_matrix(rng, 30, 3, 0.25);
    const auto once = standardize(m);
    const auto twice = standardize(once);
    ASSERT_TRUE((once.observed() == m.observed()).all());
    ASSERT_TRUE((twice.observed() == m.observed()).all());
    for (std::size_t j = 0; j < 3; ++j) {
      const auto v = once.observed_values(j);
      EXPECT_NEAR(mean(v), 0.0, 1e-12);
      EXPECT_NEAR(sample_sd(v), 1.0, 1e-12);
      for (std::size_t i = 0; i < 30; ++i) {
        if (m.is_observed(i, j)) EXPECT_NEAR(once.value(i, j), twice.value(i, j), 1e-10);
      }
    }
  }
}

TEST(Standardize, InvertRecoversValues) {
  Rng rng(6);
  const auto m = random_matrix(rng, 20, 3, 0.0);
  const auto s = Standardization::fit(m);
  const Matrix back = s.invert(s.apply(m).values());
  EXPECT_LT((back - m.values()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Correlation, SpecExamples) {
  const auto r = correlation_matrix(columns(features({"x", "y"}), {{1, 2, 3}, {2, 4, 6}}));
  EXPECT_DOUBLE_EQ(r(0, 0), 1.0);
  EXPECT_NEAR(r(0, 1), 1.0, 1e-15);
  const auto r2 = correlation_matrix(columns(features({"x", "y"}), {{1, 2, 3, 4}, {1, 3, 2, 4}}));
  EXPECT_NEAR(r2(0, 1), 0.8, 1e-15);
}

TEST(Correlation, PairwiseCompleteUsesSharedRows) {
  // Row 2 is missing in y and must be ignored for the (x, y) pair only.
  const auto m = columns(features({"x", "y", "z"}), {{1, 2, 100, 3, 4}, {1, 3, NA, 2, 4}, {5, 1, 2, 8, 3}});
  const auto r = correlation_matrix(m);
  EXPECT_NEAR(r(0, 1), 0.8, 1e-15);
  const std::vector<double> x{1, 2, 100, 3, 4}, z{5, 1, 2, 8, 3};
  EXPECT_NEAR(r(0, 2), pearson(x, z), 1e-15);
  EXPECT_DOUBLE_EQ(r(1, 2), r(2, 1));
}

TEST(Correlation, InsufficientOverlapNamesPair) {
  const auto m = columns(features({"left", "right"}), {{1, 2, 3, 4, NA, NA}, {NA, NA, NA, 5, 6, 7}});
  try {
    correlation_matrix(m);
    FAIL();
  } catch (const OverlapError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("left"), std::string::npos);
    EXPECT_NE(msg.find("right"), std::string::npos);
  }
}

TEST(Correlation, InvariantToStandardization) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_matrix(rng, 40, 4, 0.0);
    EXPECT_LT((correlation_matrix(m) - correlation_matrix(standardize(m))).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Correlation, BoundedSymmetricUnitDiagonal) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto r = correlation_matrix(random_matrix(rng, 40, 5, 0.3));
    EXPECT_LT((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    for (Eigen::Index j = 0; j < 5; ++j) EXPECT_DOUBLE_EQ(r(j, j), 1.0);
    EXPECT_LE(r.cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(ColumnStats, SpecExamples) {
  const auto m = columns(features({"a", "b", "gone"}), {{1, 2, NA, 3}, {1, 2, 3, 100}, {NA, NA, NA, NA}});
  const auto a = column_stats(m, "a");
  EXPECT_DOUBLE_EQ(a.mean, 2.0);
  EXPECT_EQ(a.observed_count, 3u);
  EXPECT_DOUBLE_EQ(a.sd, 1.0);
  EXPECT_DOUBLE_EQ(column_stats(m, "b").median, 2.5);
  EXPECT_THROW(column_stats(m, "gone"), DegenerateColumnError);
  EXPECT_THROW(column_stats(m, "missing"), SchemaError);
}

TEST(Ranks, TiesShareMeanRank) {
  const std::vector<double> x{10, 20, 20, 5};
  EXPECT_EQ(average_ranks(x), (std::vector<double>{2, 3.5, 3.5, 1}));
  const std::vector<double> y{1, 2, 3, 4}, yr{4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(spearman(y, yr), -1.0);
}

TEST(Rng, SplitmixReferenceOutput) {
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64(state), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(splitmix64(state), 0x6e789e6aa1b965f4ULL);
}

TEST(Rng, NormalQuantileReference) {
  EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 3e-9);
  EXPECT_NEAR(normal_quantile(0.5), 0.0, 1e-15);
  EXPECT_NEAR(normal_quantile(1e-6), -4.753424308822899, 1e-8);
}

TEST(Rng, UniformStaysOpenAndIndexInRange) {
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(rng.index(7), 7u);
  }
}

TEST(Rng, MomentsOfNormals) {
  Rng rng(4);
  double s = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.015);
}

TEST(Rng, DerivedSeedsDifferByStageReplicateMethod) {
  const auto a = derive_seed(1, "impute", 0, "pmm");
  EXPECT_EQ(a, derive_seed(1, "impute", 0, "pmm"));
  EXPECT_NE(a, derive_seed(1, "impute", 1, "pmm"));
  EXPECT_NE(a, derive_seed(1, "impute", 0, "ppca"));
  EXPECT_NE(a, derive_seed(2, "impute", 0, "pmm"));
}
