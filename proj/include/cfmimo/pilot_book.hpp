/**
 * @file pilot_book.hpp
 * @brief Orthonormal pilot matrices and pilot-sharing sets.
 */
#pragma once

#include <armadillo>
#include <cstdint>
#include <vector>

#include "cfmimo/config.hpp"

namespace cfmimo {

struct PilotBook {
  /// K' matrices of size tau_p x M with orthonormal columns; matrices with
  /// different indices are mutually orthogonal.
  std::vector<arma::cx_mat> matrices;
  /// user index -> pilot matrix index
  std::vector<int> assignment;
  /// sharing_sets[k] lists every user with the same pilot matrix as user k,
  /// including k itself, in ascending order.
  std::vector<std::vector<int>> sharing_sets;

  const arma::cx_mat& pilot_of(int user) const {
    return matrices[static_cast<std::size_t>(assignment[static_cast<std::size_t>(user)])];
  }
};

/// Builds K' disjoint column blocks of the tau_p x tau_p identity and assigns
/// users to them in groups of K/K' chosen uniformly at random.
PilotBook build_pilot_book(const SystemConfig& config, std::uint64_t seed);

/// Rebuilds sharing sets from an assignment (used by custom books in tests).
std::vector<std::vector<int>> sharing_sets_from_assignment(
    const std::vector<int>& assignment, int num_matrices);

}  // namespace cfmimo
