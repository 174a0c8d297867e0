#include "featimp/synth.hpp"

#include "featimp/csv_io.hpp"
#include "featimp/error.hpp"
#include "featimp/kv_config.hpp"
#include "featimp/random.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace featimp {

std::string to_string(Link l) {
  switch (l) {
    case Link::identity: return "identity";
    case Link::binary: return "binary";
    case Link::exp: return "exp";
    case Link::saturating: return "saturating";
  }
  return "identity";
}

Link parse_link(const std::string& s) {
  if (s == "identity") return Link::identity;
  if (s == "binary") return Link::binary;
  if (s == "exp") return Link::exp;
  if (s == "saturating") return Link::saturating;
  throw SchemaError("latent spec: unknown column link '" + s + "'");
}

void LatentSpec::validate() const {
  if (rows < 2) throw ContractError("latent spec: need at least 2 rows");
  if (factor_names.empty()) throw ContractError("latent spec: need at least one factor");
  if (factor_sd.size() != factor_names.size()) throw ContractError("latent spec: factor sd count mismatch");
  for (double s : factor_sd) {
    if (!(s >= 0.0)) throw ContractError("latent spec: factor sd must be non-negative");
  }
  if (columns.empty()) throw ContractError("latent spec: no columns");
  for (const auto& c : columns) {
    if (c.loadings.size() != factor_names.size()) {
      throw ContractError("latent spec: column '" + c.name + "' has " + std::to_string(c.loadings.size()) +
                          " loadings for " + std::to_string(factor_names.size()) + " factors");
    }
    if (!(c.noise_sd >= 0.0)) throw ContractError("latent spec: column '" + c.name + "' has negative noise sd");
  }
}

std::vector<std::string> LatentSpec::continuous_columns() const {
  std::vector<std::string> out;
  for (const auto& c : columns) {
    if (c.link == Link::identity) out.push_back(c.name);
  }
  return out;
}

Matrix LatentSpec::implied_correlation() const {
  validate();
  std::vector<const LatentColumn*> cont;
  for (const auto& c : columns) {
    if (c.link == Link::identity) cont.push_back(&c);
  }
  const auto p = static_cast<Eigen::Index>(cont.size());
  const auto f = static_cast<Eigen::Index>(factor_names.size());
  Matrix load(p, f);
  Vector noise(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index k = 0; k < f; ++k) load(j, k) = cont[static_cast<std::size_t>(j)]->loadings[static_cast<std::size_t>(k)];
    noise(j) = cont[static_cast<std::size_t>(j)]->noise_sd;
  }
  Vector fvar(f);
  for (Eigen::Index k = 0; k < f; ++k) fvar(k) = factor_sd[static_cast<std::size_t>(k)] * factor_sd[static_cast<std::size_t>(k)];
  Matrix cov = load * fvar.asDiagonal() * load.transpose();
  cov.diagonal() += noise.cwiseProduct(noise);
  const Vector sd = cov.diagonal().cwiseSqrt();
  return cov.cwiseQuotient(sd * sd.transpose());
}

DataMatrix generate(const LatentSpec& spec) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.rows);
  const auto p = static_cast<Eigen::Index>(spec.columns.size());
  const auto nf = spec.factor_names.size();
  Matrix x(n, p);
  Rng rng(spec.seed);
  std::vector<double> z(nf);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < nf; ++k) z[k] = spec.factor_sd[k] * rng.normal();
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto& c = spec.columns[static_cast<std::size_t>(j)];
      double v = 0.0;
      for (std::size_t k = 0; k < nf; ++k) v += c.loadings[k] * z[k];
      v += c.noise_sd * rng.normal();
      switch (c.link) {
        case Link::identity: x(i, j) = v; break;
        case Link::binary: x(i, j) = v > 0.0 ? 1.0 : 0.0; break;
        case Link::exp: x(i, j) = std::exp(v); break;
        case Link::saturating: x(i, j) = 1.0 - std::exp(-v); break;
      }
    }
  }
  std::vector<ColumnInfo> info;
  for (const auto& c : spec.columns) info.push_back({c.name, c.role});
  return DataMatrix(std::move(info), std::move(x));
}

namespace {

LatentColumn unit_variance(std::string name, Role role, std::vector<double> loadings, Link link = Link::identity) {
  double common = 0.0;
  for (double l : loadings) common += l * l;
  if (common >= 1.0) throw ContractError("default spec: loadings of '" + name + "' exceed unit variance");
  return {std::move(name), role, std::move(loadings), std::sqrt(1.0 - common), link};
}

}  // namespace

LatentSpec default_clinic_analog() {
  LatentSpec s;
  s.rows = 1000;
  s.seed = 20200712;
  s.factor_names = {"severity", "demographic", "selfreport"};
  s.factor_sd = {1.0, 1.0, 1.0};
  const auto F = Role::feature;
  s.columns = {
      {"CDRSB", Role::class_label, {1.2, 0.0, 0.0}, 0.02, Link::saturating},
      unit_variance("Gender", Role::demographic, {0.0, 0.75, 0.0}, Link::binary),
      unit_variance("Age", Role::demographic, {0.10, 0.75, 0.0}),
      unit_variance("EcogSPTotal", F, {0.94, 0.0, 0.10}),
      unit_variance("EcogSPMem", F, {0.89, 0.0, 0.05}),
      unit_variance("LDELTOTAL", F, {-0.84, 0.0, 0.0}),
      unit_variance("EcogSPLang", F, {0.78, 0.0, 0.05}),
      unit_variance("MOCA", F, {-0.71, 0.0, 0.0}),
      unit_variance("EcogSPPlan", F, {0.64, 0.0, 0.05}),
      unit_variance("EcogSPVisspat", F, {0.55, 0.0, 0.0}),
      unit_variance("EcogPtTotal", F, {0.30, 0.0, 0.80}),
      unit_variance("MMSE", Role::driver, {-0.80, 0.0, 0.0}),
  };
  return s;
}

void write_latent_spec(std::ostream& out, const LatentSpec& spec) {
  out << "rows = " << spec.rows << '\n';
  out << "seed = " << spec.seed << '\n';
  for (std::size_t k = 0; k < spec.factor_names.size(); ++k) {
    out << "factor = " << spec.factor_names[k] << ' ' << format_double(spec.factor_sd[k]) << '\n';
  }
  for (const auto& c : spec.columns) {
    out << "column = " << c.name << " | " << to_string(c.role) << " |";
    for (double l : c.loadings) out << ' ' << format_double(l);
    out << " | " << format_double(c.noise_sd);
    if (c.link != Link::identity) out << " | " << to_string(c.link);
    out << '\n';
  }
}

LatentSpec read_latent_spec(std::istream& in) {
  LatentSpec s;
  s.factor_names.clear();
  s.factor_sd.clear();
  auto number = [](const std::string& text, const std::string& what) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw SchemaError("latent spec: cannot parse " + what + " '" + text + "'");
    }
  };
  for (const auto& [key, value] : read_kv(in)) {
    if (key == "rows") {
      s.rows = static_cast<std::size_t>(number(value, "rows"));
    } else if (key == "seed") {
      try {
        s.seed = std::stoull(value);
      } catch (const std::exception&) {
        throw SchemaError("latent spec: cannot parse seed '" + value + "'");
      }
    } else if (key == "factor") {
      std::istringstream ss(value);
      std::string name, sd;
      ss >> name >> sd;
      if (name.empty() || sd.empty()) throw SchemaError("latent spec: factor needs a name and an sd");
      s.factor_names.push_back(name);
      s.factor_sd.push_back(number(sd, "factor sd"));
    } else if (key == "column") {
      const auto parts = split(value, '|');
      if (parts.size() < 4 || parts.size() > 5) throw SchemaError("latent spec: malformed column '" + value + "'");
      LatentColumn c;
      c.name = parts[0];
      c.role = parse_role(parts[1]);
      std::istringstream ls(parts[2]);
      std::string tok;
      while (ls >> tok) c.loadings.push_back(number(tok, "loading"));
      c.noise_sd = number(parts[3], "noise sd");
      if (parts.size() == 5) {
        c.link = parse_link(parts[4]);
      }
      s.columns.push_back(std::move(c));
    } else {
      throw SchemaError("latent spec: unknown key '" + key + "'");
    }
  }
  s.validate();
  return s;
}

LatentSpec load_latent_spec(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "'");
  return read_latent_spec(f);
}

}  // namespace featimp
