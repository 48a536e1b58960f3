/**
 * @file rng.hpp
 * @brief Deterministic seed derivation and complex Gaussian sampling.
 */
#pragma once

#include <armadillo>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace cfmimo {

constexpr std::uint64_t kSeedGolden = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer, the mixing step of the seed-derivation scheme.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += kSeedGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based seed derivation: a master seed plus a list of stream words
/// (purpose tag, setup index, realization index, ...) maps to an independent
/// seed. Recorded in run manifests as the seed lineage scheme.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> words);

// Purpose tags for the seed lineage. Values are stable across releases.
namespace stream {
constexpr std::uint64_t kGeometry = 1;
constexpr std::uint64_t kPilotAssignment = 2;
constexpr std::uint64_t kCalibration = 3;
constexpr std::uint64_t kEvaluation = 4;
constexpr std::uint64_t kChannel = 5;
constexpr std::uint64_t kUplinkNoise = 6;
constexpr std::uint64_t kDownlinkNoise = 7;
}  // namespace stream

/// Seeded generator with the draws used throughout the simulator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double gaussian() { return normal_(gen_); }

  /// Circularly-symmetric complex Gaussian CN(0, 1).
  std::complex<double> cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return {re * kInvSqrt2, im * kInvSqrt2};
  }

  arma::cx_mat cgaussian_mat(arma::uword rows, arma::uword cols);
  arma::cx_vec cgaussian_vec(arma::uword n);

  double uniform(double lo, double hi);

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);

  /// Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<int> permutation(int n);

 private:
  static constexpr double kInvSqrt2 = 0.70710678118654752440;
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// FNV-1a over raw bytes; used for realization-stream digests.
std::uint64_t fnv1a_bytes(const void* data, std::size_t len,
                          std::uint64_t h = 1469598103934665603ULL);

/// Chains a complex matrix into a digest (column-major byte order).
std::uint64_t digest_matrix(const arma::cx_mat& m, std::uint64_t h);

}  // namespace cfmimo
