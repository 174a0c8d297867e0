#include "featimp/missingness.hpp"

#include "featimp/error.hpp"
#include "featimp/random.hpp"
#include "featimp/stats.hpp"

#include <algorithm>

namespace featimp {

namespace {

std::vector<std::size_t> resolve_targets(const DataMatrix& m, const MissingnessSpec& spec, std::size_t driver) {
  std::vector<std::size_t> targets;
  if (spec.targets.empty()) {
    targets = m.indices_with_role(Role::feature);
  } else {
    for (const auto& name : spec.targets) targets.push_back(m.index_of(name));
  }
  for (auto j : targets) {
    if (j == driver || m.column(j).role != Role::feature) {
      throw ContractError("column '" + m.column(j).name + "' cannot receive missingness (role " +
                          std::string(to_string(m.column(j).role)) + ")");
    }
  }
  return targets;
}

}  // namespace

double cell_probability(const MissingnessSpec& spec, double driver_scaled) {
  return std::clamp(spec.base_rate + spec.sign * spec.slope * driver_scaled, 0.0, 1.0);
}

std::vector<double> scaled_driver(const DataMatrix& m, const MissingnessSpec& spec) {
  const auto d = m.index_of(spec.driver);
  if (m.observed_count(d) != m.rows()) throw ContractError("driver '" + spec.driver + "' has missing cells");
  auto v = m.observed_values(d);
  if (spec.scaling == DriverScaling::zscore) {
    const double mu = mean(v);
    const double sd = sample_sd(v);
    if (sd == 0.0) throw DegenerateColumnError("driver '" + spec.driver + "' has zero variance");
    for (auto& x : v) x = (x - mu) / sd;
  } else {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double a = *lo, range = *hi - *lo;
    if (range == 0.0) throw DegenerateColumnError("driver '" + spec.driver + "' has zero range");
    for (auto& x : v) x = (x - a) / range;
  }
  return v;
}

InjectionOutcome inject(const DataMatrix& m, const MissingnessSpec& spec) {
  if (spec.base_rate < 0.0 || spec.base_rate > 1.0) throw ContractError("base_rate must lie in [0, 1]");
  if (spec.slope < 0.0) throw ContractError("slope must be non-negative");
  if (spec.sign != 1 && spec.sign != -1) throw ContractError("sign must be +1 or -1");

  const auto driver = m.index_of(spec.driver);
  const auto targets = resolve_targets(m, spec, driver);
  for (auto j : targets) {
    if (m.observed_count(j) != m.rows()) {
      throw ContractError("target column '" + m.column(j).name + "' already contains missing cells");
    }
  }
  const auto z = scaled_driver(m, spec);

  InjectionOutcome out;
  out.truth = m;
  out.seed = spec.seed;
  out.row_probability.resize(m.rows());
  Mask mask = m.observed();
  Rng rng(spec.seed);
  std::size_t masked = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double p = cell_probability(spec, z[i]);
    out.row_probability[i] = p;
    for (auto j : targets) {
      if (rng.uniform() < p) {
        mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = false;
        ++masked;
      }
    }
  }
  const auto cells = m.rows() * targets.size();
  out.realized_rate = cells ? static_cast<double>(masked) / static_cast<double>(cells) : 0.0;
  out.data = m.with_mask(std::move(mask));
  return out;
}

std::vector<InjectionOutcome> replicate(const DataMatrix& m, const MissingnessSpec& spec, std::size_t n) {
  if (n == 0) throw ContractError("replicate: n must be at least 1");
  std::vector<InjectionOutcome> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto s = spec;
    s.seed = spec.seed + i;
    out.push_back(inject(m, s));
  }
  return out;
}

}  // namespace featimp
