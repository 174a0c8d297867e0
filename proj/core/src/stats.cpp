#include "featimp/stats.hpp"

#include "featimp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace featimp {

double mean(std::span<const double> x) {
  if (x.empty()) throw ContractError("mean of an empty sequence");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double median(std::vector<double> x) {
  if (x.empty()) throw ContractError("median of an empty sequence");
  const auto n = x.size();
  const auto mid = x.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(x.begin(), mid, x.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(x.begin(), mid);
  return 0.5 * (lower + upper);
}

double sample_sd(std::span<const double> x) {
  if (x.size() < 2) throw ContractError("standard deviation needs at least two values");
  const double mu = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ContractError("pearson: length mismatch");
  if (x.size() < 2) throw ContractError("pearson: need at least two pairs");
  // A constant side must give exactly 0; its floating-point mean need not equal its values.
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double a) { return a == v.front(); });
  };
  if (constant(x) || constant(y)) return 0.0;
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t k = i;
    while (k + 1 < order.size() && x[order[k + 1]] == x[order[i]]) ++k;
    const double r = 0.5 * static_cast<double>(i + k) + 1.0;
    for (std::size_t t = i; t <= k; ++t) ranks[order[t]] = r;
    i = k + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

ColumnStats column_stats(const DataMatrix& m, std::size_t j) {
  const auto v = m.observed_values(j);
  if (v.empty()) throw DegenerateColumnError("column '" + m.column(j).name + "' has no observed values");
  ColumnStats s;
  s.observed_count = v.size();
  s.mean = mean(v);
  s.sd = v.size() >= 2 ? sample_sd(v) : 0.0;
  s.median = median(v);
  return s;
}

ColumnStats column_stats(const DataMatrix& m, std::string_view name) {
  return column_stats(m, m.index_of(name));
}

Standardization Standardization::fit(const DataMatrix& m) {
  Standardization s;
  s.means.resize(static_cast<Eigen::Index>(m.cols()));
  s.sds.resize(static_cast<Eigen::Index>(m.cols()));
  for (std::size_t j = 0; j < m.cols(); ++j) {
    const auto v = m.observed_values(j);
    if (v.size() < 2) {
      throw DegenerateColumnError("column '" + m.column(j).name + "' has fewer than 2 observed values");
    }
    const double sd = sample_sd(v);
    if (!(sd > 0.0)) throw DegenerateColumnError("column '" + m.column(j).name + "' has zero variance");
    s.means(static_cast<Eigen::Index>(j)) = mean(v);
    s.sds(static_cast<Eigen::Index>(j)) = sd;
  }
  return s;
}

DataMatrix Standardization::apply(const DataMatrix& m) const {
  Matrix z = m.values();
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    z.col(j) = (z.col(j).array() - means(j)) / sds(j);
  }
  return m.with_values(std::move(z));
}

Matrix Standardization::invert(const Matrix& z) const {
  Matrix x = z;
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    x.col(j) = x.col(j).array() * sds(j) + means(j);
  }
  return x;
}

DataMatrix standardize(const DataMatrix& m) { return Standardization::fit(m).apply(m); }

Matrix correlation_matrix(const DataMatrix& m) {
  const auto p = static_cast<Eigen::Index>(m.cols());
  const auto n = static_cast<Eigen::Index>(m.rows());
  Matrix r = Matrix::Identity(p, p);
  const auto& x = m.values();
  const auto& o = m.observed();
  for (Eigen::Index a = 0; a < p; ++a) {
    if (o.col(a).count() < 3) {
      throw OverlapError("column '" + m.column(static_cast<std::size_t>(a)).name +
                         "' has fewer than 3 observed rows");
    }
    for (Eigen::Index b = a + 1; b < p; ++b) {
      std::vector<double> xa, xb;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (o(i, a) && o(i, b)) {
          xa.push_back(x(i, a));
          xb.push_back(x(i, b));
        }
      }
      const auto& na = m.column(static_cast<std::size_t>(a)).name;
      const auto& nb = m.column(static_cast<std::size_t>(b)).name;
      if (xa.size() < 3) {
        throw OverlapError("columns '" + na + "' and '" + nb + "' share only " + std::to_string(xa.size()) +
                           " jointly observed rows (need 3)");
      }
      if (sample_sd(xa) == 0.0 || sample_sd(xb) == 0.0) {
        throw DegenerateColumnError("columns '" + na + "' / '" + nb + "' are constant on their overlap");
      }
      r(a, b) = r(b, a) = pearson(xa, xb);
    }
  }
  return r;
}

}  // namespace featimp
