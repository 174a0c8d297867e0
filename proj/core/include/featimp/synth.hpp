#pragma once

#include "featimp/data_matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace featimp {

/// Output transform applied to a column's latent value v.
enum class Link {
  identity,
  binary,  // 1 when v > 0, else 0
  exp,     // exp(v), a right-skewed positive score
  saturating,  // 1 - exp(-v), rises with v and flattens toward 1
};

std::string to_string(Link l);
Link parse_link(const std::string& s);

struct LatentColumn {
  std::string name;
  Role role = Role::feature;
  /// One loading per factor.
  std::vector<double> loadings;
  double noise_sd = 0.0;
  Link link = Link::identity;

  friend bool operator==(const LatentColumn&, const LatentColumn&) = default;
};

/// Gaussian latent-factor design: column = sum_f loading_f * z_f + noise with
/// z_f ~ N(0, factor_sd_f^2) and independent N(0, noise_sd^2) noise.
struct LatentSpec {
  std::size_t rows = 1000;
  std::uint64_t seed = 1;
  std::vector<std::string> factor_names;
  std::vector<double> factor_sd;
  std::vector<LatentColumn> columns;

  void validate() const;
  /// Correlation matrix implied for the identity-link columns.
  Matrix implied_correlation() const;
  std::vector<std::string> continuous_columns() const;

  friend bool operator==(const LatentSpec&, const LatentSpec&) = default;
};

/// Complete matrix drawn from `spec`; per row all factors are drawn first,
/// then each column's noise in column order.
DataMatrix generate(const LatentSpec& spec);

/// Three-factor design shaped like a memory-clinic table. The severity factor
/// carries seven assessment scores, an MMSE-like driver and a class score that
/// saturates at the severe end; a demographic factor carries Gender (binary)
/// and Age; a self-report factor carries one patient-rated score.
LatentSpec default_clinic_analog();

/// Flat text form:
///   rows = 1000
///   seed = 7
///   factor = severity 1.0
///   column = NAME | role | l1 l2 ... | noise_sd [| binary|exp|saturating]
void write_latent_spec(std::ostream& out, const LatentSpec& spec);
LatentSpec read_latent_spec(std::istream& in);
LatentSpec load_latent_spec(const std::filesystem::path& path);

}  // namespace featimp
