#pragma once

#include <armadillo>
#include <string>

#include "cfmimo/channel.hpp"
#include "cfmimo/config.hpp"
#include "cfmimo/pilot_book.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo::test {

/// Small valid configuration; tweak fields per test.
inline SystemConfig small_config(int num_aps = 2, int ap_antennas = 2,
                                 int num_users = 2, int user_antennas = 2,
                                 int num_pilot_matrices = 2) {
  SystemConfig cfg;
  cfg.num_aps = num_aps;
  cfg.ap_antennas = ap_antennas;
  cfg.num_users = num_users;
  cfg.user_antennas = user_antennas;
  cfg.num_pilot_matrices = num_pilot_matrices;
  cfg.pilot_len = 0;
  cfg.coherence_len = 200;
  cfg.ul_pilot_power = 1.0;
  cfg.dl_power = 1.0;
  cfg.area_side_m = 1000.0;
  return cfg;
}

/// Geometry with every beta pinned to one value; positions unused by most
/// channel-level tests.
inline Geometry flat_geometry(const SystemConfig& cfg, double beta = 1.0) {
  Geometry g;
  g.ap_xy.zeros(cfg.num_aps, 2);
  g.user_xy.zeros(cfg.num_users, 2);
  g.beta.set_size(cfg.num_aps, cfg.num_users);
  g.beta.fill(beta);
  return g;
}

/// Pilot book whose matrices are disjoint column blocks of a random
/// tau_p x tau_p unitary; exercises the general orthonormal case.
inline PilotBook random_unitary_pilot_book(const SystemConfig& cfg,
                                           std::uint64_t seed) {
  const int tau_p = cfg.pilot_len_or_default();
  const int m = cfg.user_antennas;
  Rng rng(seed);
  arma::cx_mat q, r;
  arma::qr(q, r, rng.cgaussian_mat(tau_p, tau_p));

  PilotBook book = build_pilot_book(cfg, seed);
  for (int i = 0; i < cfg.num_pilot_matrices; ++i) {
    book.matrices[static_cast<std::size_t>(i)] =
        q.cols(static_cast<arma::uword>(i * m),
               static_cast<arma::uword>((i + 1) * m - 1));
  }
  return book;
}

inline double rel_err(const arma::cx_mat& got, const arma::cx_mat& want) {
  const double denom = arma::norm(want, "fro");
  return arma::norm(got - want, "fro") / (denom > 0 ? denom : 1.0);
}

inline arma::cx_mat scalar_mat(arma::cx_double v) {
  arma::cx_mat m(1, 1);
  m(0, 0) = v;
  return m;
}

}  // namespace cfmimo::test
