#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace featimp {

/// xoshiro256** seeded through splitmix64.
///
/// Every draw used by the library goes through this class so that results
/// are bit-reproducible across standard libraries: uniform reals take the top
/// 53 bits, bounded integers use Lemire's multiply-and-reject, and normals use
/// the inverse CDF (Acklam's rational approximation) of one uniform.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Uniform integer in [0, n); n must be positive.
  std::uint64_t index(std::uint64_t n);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Chi-squared with integer degrees of freedom, as a sum of squared normals.
  double chi_squared(std::uint64_t df);

  template <typename T>
  void shuffle(std::span<T> v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto k = static_cast<std::size_t>(index(i));
      std::swap(v[i - 1], v[k]);
    }
  }

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Standard normal quantile (Acklam; relative error below 1.2e-9).
double normal_quantile(double p);

/// Seed for one pipeline stage: FNV-1a of "stage/replicate/method" mixed
/// with the master seed through splitmix64.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage, std::uint64_t replicate = 0,
                          std::string_view method = {});

}  // namespace featimp
