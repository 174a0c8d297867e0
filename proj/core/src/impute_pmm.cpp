#include "featimp/error.hpp"
#include "featimp/imputers.hpp"
#include "featimp/random.hpp"
#include "impute_detail.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace featimp {

namespace {

struct Draw {
  Vector beta_hat;
  Vector beta_star;
};

// Bayesian linear-regression draw: ridge-stabilized normal equations, a
// chi-squared draw for the residual scale, then a normal draw for the
// coefficients around the estimate.
Draw posterior_draw(const Matrix& x, const Vector& y, double ridge, Rng& rng, const std::string& column) {
  Matrix xtx = x.transpose() * x;
  for (Eigen::Index d = 0; d < xtx.rows(); ++d) xtx(d, d) += ridge * xtx(d, d);
  Eigen::LLT<Matrix> chol_xtx(xtx);
  if (chol_xtx.info() != Eigen::Success) {
    throw DegenerateColumnError("PMM: singular design for column '" + column + "' even with ridge");
  }
  const Matrix v = chol_xtx.solve(Matrix::Identity(xtx.rows(), xtx.cols()));
  Draw d;
  d.beta_hat = v * (x.transpose() * y);
  const Vector resid = y - x * d.beta_hat;
  const auto df = std::max<Eigen::Index>(x.rows() - x.cols(), 1);
  const double sigma_star = std::sqrt(resid.squaredNorm() / rng.chi_squared(static_cast<std::uint64_t>(df)));
  Eigen::LLT<Matrix> chol_v(0.5 * (v + v.transpose()));
  if (chol_v.info() != Eigen::Success) {
    throw DegenerateColumnError("PMM: coefficient covariance for column '" + column + "' is not positive definite");
  }
  Vector z(x.cols());
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = rng.normal();
  d.beta_star = d.beta_hat + Matrix(chol_v.matrixL()) * z * sigma_star;
  return d;
}

// Indices (into `sorted`) of the `donors` observed predictions closest to
// `target`; ties prefer the lower sorted position.
void nearest(const std::vector<double>& sorted, double target, std::size_t donors, std::vector<std::size_t>& out) {
  out.clear();
  auto hi = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), target) - sorted.begin());
  auto lo = hi;  // candidates below are [0, lo), above are [hi, n)
  while (out.size() < donors) {
    const bool can_lo = lo > 0;
    const bool can_hi = hi < sorted.size();
    if (!can_lo && !can_hi) break;
    if (can_lo && (!can_hi || target - sorted[lo - 1] <= sorted[hi] - target)) {
      out.push_back(--lo);
    } else {
      out.push_back(hi++);
    }
  }
}

DataMatrix one_imputation(const DataMatrix& m, const std::vector<std::size_t>& targets,
                          const std::vector<std::size_t>& cols, const PmmConfig& cfg, std::uint64_t seed,
                          std::vector<double>& trace) {
  Rng rng(seed);
  Matrix v = detail::mean_filled(m);
  const auto n = static_cast<Eigen::Index>(m.rows());
  std::vector<std::size_t> picks;

  for (std::size_t cycle = 0; cycle < cfg.cycles; ++cycle) {
    double change = 0.0;
    std::size_t changed_cells = 0;
    for (auto j : targets) {
      const auto jc = static_cast<Eigen::Index>(j);
      std::vector<Eigen::Index> obs_rows, mis_rows;
      for (Eigen::Index i = 0; i < n; ++i) (m.observed()(i, jc) ? obs_rows : mis_rows).push_back(i);

      std::vector<Eigen::Index> preds;
      for (auto c : cols) {
        if (c != j) preds.push_back(static_cast<Eigen::Index>(c));
      }
      const auto q = static_cast<Eigen::Index>(preds.size()) + 1;
      if (static_cast<Eigen::Index>(obs_rows.size()) < q + 1) {
        throw DegenerateColumnError("PMM: column '" + m.column(j).name + "' has too few observed rows");
      }
      if (obs_rows.size() < cfg.donors) {
        throw ContractError("PMM: column '" + m.column(j).name + "' has fewer observed rows than donors");
      }

      auto design = [&](const std::vector<Eigen::Index>& rows) {
        Matrix x(static_cast<Eigen::Index>(rows.size()), q);
        for (std::size_t r = 0; r < rows.size(); ++r) {
          const auto rr = static_cast<Eigen::Index>(r);
          x(rr, 0) = 1.0;
          for (std::size_t k = 0; k < preds.size(); ++k) x(rr, static_cast<Eigen::Index>(k) + 1) = v(rows[r], preds[k]);
        }
        return x;
      };
      const Matrix x_obs = design(obs_rows);
      const Matrix x_mis = design(mis_rows);
      Vector y(static_cast<Eigen::Index>(obs_rows.size()));
      for (std::size_t r = 0; r < obs_rows.size(); ++r) y(static_cast<Eigen::Index>(r)) = v(obs_rows[r], jc);

      const auto draw = posterior_draw(x_obs, y, cfg.ridge, rng, m.column(j).name);
      const Vector yhat_obs = x_obs * draw.beta_hat;
      const Vector yhat_mis = x_mis * draw.beta_star;

      std::vector<std::size_t> order(obs_rows.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return yhat_obs(static_cast<Eigen::Index>(a)) < yhat_obs(static_cast<Eigen::Index>(b));
      });
      std::vector<double> sorted(order.size());
      for (std::size_t r = 0; r < order.size(); ++r) sorted[r] = yhat_obs(static_cast<Eigen::Index>(order[r]));

      for (std::size_t r = 0; r < mis_rows.size(); ++r) {
        nearest(sorted, yhat_mis(static_cast<Eigen::Index>(r)), cfg.donors, picks);
        const auto donor = obs_rows[order[picks[static_cast<std::size_t>(rng.index(picks.size()))]]];
        const double fresh = v(donor, jc);
        const double diff = fresh - v(mis_rows[r], jc);
        change += diff * diff;
        ++changed_cells;
        v(mis_rows[r], jc) = fresh;
      }
    }
    trace.push_back(changed_cells ? std::sqrt(change / static_cast<double>(changed_cells)) : 0.0);
  }
  return detail::complete_with(m, v);
}

}  // namespace

std::vector<DataMatrix> pmm_imputations(const DataMatrix& m, const PmmConfig& cfg, std::uint64_t seed,
                                        ImputationDiagnostics* diagnostics) {
  if (cfg.m < 1 || cfg.donors < 1 || cfg.cycles < 1) throw ContractError("PMM: m, donors and cycles must be >= 1");
  const auto cols = detail::model_columns(m, cfg.predictors);
  const auto targets = detail::check_imputable(m, cols.size() + 1);
  std::vector<DataMatrix> out;
  std::vector<double> trace;
  out.reserve(cfg.m);
  for (std::size_t k = 0; k < cfg.m; ++k) {
    out.push_back(one_imputation(m, targets, cols, cfg, derive_seed(seed, "pmm", k), trace));
  }
  if (diagnostics) {
    diagnostics->iterations = static_cast<int>(cfg.m * cfg.cycles);
    diagnostics->trace = std::move(trace);
    diagnostics->stop_reason = "fixed cycles";
  }
  return out;
}

ImputationResult impute_pmm(const DataMatrix& m, const PmmConfig& cfg, std::uint64_t seed) {
  ImputationResult r;
  r.method = "pmm";
  r.seed = seed;
  const auto draws = pmm_imputations(m, cfg, seed, &r.diagnostics);
  Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (const auto& d : draws) sum += d.values();
  sum /= static_cast<double>(draws.size());
  r.completed = detail::complete_with(m, sum);
  return r;
}

}  // namespace featimp
