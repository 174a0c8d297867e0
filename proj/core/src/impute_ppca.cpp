#include "featimp/error.hpp"
#include "featimp/imputers.hpp"
#include "featimp/stats.hpp"
#include "impute_detail.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace featimp {

namespace {

// Model x = W z + mu + e, z ~ N(0, I_k), e ~ N(0, sigma2 I). The augmented
// loading matrix holds [W mu] so one regression updates both.
struct PpcaParams {
  Matrix w_aug;  // d x (k + 1)
  double sigma2 = 1.0;
};

struct EStep {
  double loglik = 0.0;
  Matrix a;           // sum over rows of E[z~ z~^T], (k+1) x (k+1)
  Matrix b;           // d x (k+1): sum over rows of E[x_j z~]
  double sum_x2 = 0;  // sum over rows and coordinates of E[x_j^2]
  Matrix recon;       // posterior mean of every cell
};

EStep expectation(const Matrix& x, const Mask& obs, const PpcaParams& prm, std::size_t k) {
  const auto n = x.rows();
  const auto d = x.cols();
  const auto kk = static_cast<Eigen::Index>(k);
  const Matrix w = prm.w_aug.leftCols(kk);
  const Vector mu = prm.w_aug.col(kk);
  const double s2 = prm.sigma2;
  const double log2pi = std::log(2.0 * std::numbers::pi);

  EStep e;
  e.a = Matrix::Zero(kk + 1, kk + 1);
  e.b = Matrix::Zero(d, kk + 1);
  e.recon.resize(n, d);

  std::vector<Eigen::Index> o_idx, m_idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    o_idx.clear();
    m_idx.clear();
    for (Eigen::Index j = 0; j < d; ++j) (obs(i, j) ? o_idx : m_idx).push_back(j);
    const auto d_o = static_cast<Eigen::Index>(o_idx.size());

    Matrix w_o(d_o, kk);
    Vector r(d_o);
    for (Eigen::Index t = 0; t < d_o; ++t) {
      w_o.row(t) = w.row(o_idx[static_cast<std::size_t>(t)]);
      r(t) = x(i, o_idx[static_cast<std::size_t>(t)]) - mu(o_idx[static_cast<std::size_t>(t)]);
    }
    Matrix mm = w_o.transpose() * w_o;
    mm.diagonal().array() += s2;
    Eigen::LLT<Matrix> llt(mm);
    const Vector wtr = w_o.transpose() * r;
    const Vector ez = llt.solve(wtr);
    const Matrix cov = s2 * llt.solve(Matrix::Identity(kk, kk));

    const double log_det_m = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
    const double log_det_c = static_cast<double>(d_o - kk) * std::log(s2) + log_det_m;
    const double quad = (r.squaredNorm() - wtr.dot(ez)) / s2;
    e.loglik += -0.5 * (static_cast<double>(d_o) * log2pi + log_det_c + quad);

    Matrix ezz(kk + 1, kk + 1);
    ezz.topLeftCorner(kk, kk) = cov + ez * ez.transpose();
    ezz.topRightCorner(kk, 1) = ez;
    ezz.bottomLeftCorner(1, kk) = ez.transpose();
    ezz(kk, kk) = 1.0;
    e.a += ezz;

    Vector ez_aug(kk + 1);
    ez_aug.head(kk) = ez;
    ez_aug(kk) = 1.0;
    e.recon.row(i) = (prm.w_aug * ez_aug).transpose();
    for (auto j : o_idx) {
      e.b.row(j) += x(i, j) * ez_aug.transpose();
      e.sum_x2 += x(i, j) * x(i, j);
    }
    for (auto j : m_idx) {
      const Eigen::RowVectorXd wj = prm.w_aug.row(j);
      const Eigen::RowVectorXd we = wj * ezz;
      e.b.row(j) += we;
      e.sum_x2 += we.dot(wj) + s2;
    }
  }
  return e;
}

PpcaParams initial_params(const Matrix& filled, std::size_t k, double floor) {
  const auto n = filled.rows();
  const auto d = filled.cols();
  const auto kk = static_cast<Eigen::Index>(k);
  const Vector mu = filled.colwise().mean();
  const Matrix centred = filled.rowwise() - mu.transpose();
  const Matrix cov = centred.transpose() * centred / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  // Eigen returns ascending eigenvalues.
  double rest = 0.0;
  for (Eigen::Index c = 0; c < d - kk; ++c) rest += std::max(0.0, eig.eigenvalues()(c));
  PpcaParams prm;
  prm.sigma2 = std::max(floor, d > kk ? rest / static_cast<double>(d - kk) : floor);
  prm.w_aug.resize(d, kk + 1);
  for (Eigen::Index c = 0; c < kk; ++c) {
    const auto src = d - 1 - c;
    const double lam = eig.eigenvalues()(src);
    const double scale = std::sqrt(std::max(lam - prm.sigma2, 1e-6 * std::max(lam, 1.0)));
    prm.w_aug.col(c) = eig.eigenvectors().col(src) * scale;
  }
  prm.w_aug.col(kk) = mu;
  return prm;
}

}  // namespace

ImputationResult impute_ppca(const DataMatrix& m, const PpcaConfig& cfg, std::uint64_t seed) {
  detail::check_imputable(m, 2);
  const auto cols = detail::model_columns(m, cfg.predictors);
  if (cfg.k < 1 || cfg.k >= cols.size()) throw ContractError("PPCA: k must lie in [1, #columns - 1]");
  if (cfg.max_iter < 1 || !(cfg.tol > 0.0)) throw ContractError("PPCA: bad iteration settings");

  const auto sub = m.select(cols);
  const auto scaling = Standardization::fit(sub);
  const auto z = scaling.apply(sub);
  const Matrix x = z.observed().select(z.values(), 0.0);
  const Mask& obs = z.observed();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (!obs.row(i).any()) throw ContractError("PPCA: row " + std::to_string(i) + " has no observed cells");
  }

  ImputationResult result;
  result.method = "ppca";
  result.seed = seed;
  auto& diag = result.diagnostics;
  diag.components = cfg.k;

  auto prm = initial_params(x, cfg.k, cfg.sigma2_floor);
  const double nd = static_cast<double>(x.rows() * x.cols());
  EStep e = expectation(x, obs, prm, cfg.k);
  diag.trace.push_back(e.loglik);
  diag.converged = false;
  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    Eigen::LDLT<Matrix> a_solver(e.a);
    prm.w_aug = a_solver.solve(e.b.transpose()).transpose();
    double s2 = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) s2 += prm.w_aug.row(j).dot(e.b.row(j));
    s2 = (e.sum_x2 - s2) / nd;
    const bool floored = !(s2 > cfg.sigma2_floor);
    prm.sigma2 = floored ? cfg.sigma2_floor : s2;

    const double prev = e.loglik;
    e = expectation(x, obs, prm, cfg.k);
    diag.trace.push_back(e.loglik);
    diag.iterations = iter;
    if (!std::isfinite(e.loglik)) throw ConvergenceError("PPCA: log-likelihood became non-finite");
    if (floored) {
      diag.converged = true;
      diag.stop_reason = "noise variance reached floor";
      break;
    }
    if (std::abs(e.loglik - prev) < cfg.tol * std::abs(prev)) {
      diag.converged = true;
      diag.stop_reason = "relative log-likelihood change below tol";
      break;
    }
  }
  if (!diag.converged) {
    std::string msg = "PPCA did not converge in " + std::to_string(cfg.max_iter) + " iterations; last log-likelihoods:";
    for (auto i = diag.trace.size() >= 3 ? diag.trace.size() - 3 : 0; i < diag.trace.size(); ++i) {
      msg += " " + std::to_string(diag.trace[i]);
    }
    throw ConvergenceError(msg);
  }

  Matrix filled = m.values();
  const Matrix back = scaling.invert(e.recon);
  for (std::size_t c = 0; c < cols.size(); ++c) filled.col(static_cast<Eigen::Index>(cols[c])) = back.col(static_cast<Eigen::Index>(c));
  result.completed = detail::complete_with(m, filled);
  return result;
}

}  // namespace featimp
