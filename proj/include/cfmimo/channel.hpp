/**
 * @file channel.hpp
 * @brief Small-scale fading draws, uplink pilot phase, per-AP MMSE estimates.
 */
#pragma once

#include <armadillo>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/geometry.hpp"
#include "cfmimo/pilot_book.hpp"

namespace cfmimo {

/// One i.i.d. Rayleigh-fading realization. The channel of user k is stored
/// stacked over APs as an LN x M matrix; rows [l*N, (l+1)*N) belong to AP l.
struct ChannelRealization {
  std::vector<arma::cx_mat> H;  ///< per user, LN x M
  int ap_antennas = 1;

  arma::subview<arma::cx_double> block(int user, int ap) {
    return H[static_cast<std::size_t>(user)].rows(
        static_cast<arma::uword>(ap * ap_antennas),
        static_cast<arma::uword>((ap + 1) * ap_antennas - 1));
  }
  arma::cx_mat block(int user, int ap) const {
    return H[static_cast<std::size_t>(user)].rows(
        static_cast<arma::uword>(ap * ap_antennas),
        static_cast<arma::uword>((ap + 1) * ap_antennas - 1));
  }
};

/// Entry (l*N+n, m) of user k is CN(0, beta[l][k]); deterministic under seed.
ChannelRealization draw_channels(const Geometry& geometry,
                                 const SystemConfig& config,
                                 std::uint64_t seed);

/// Pilot-correlated uplink observations, same stacked layout as the channel.
/// Users sharing a pilot matrix see the identical observation blocks.
struct UplinkObservation {
  std::vector<arma::cx_mat> Y;  ///< per user, LN x M
  int ap_antennas = 1;
};

/// Correlated-domain noise, one LN x M matrix per pilot group.
std::vector<arma::cx_mat> draw_uplink_noise(const SystemConfig& config,
                                            std::uint64_t seed);
std::vector<arma::cx_mat> zero_uplink_noise(const SystemConfig& config);

UplinkObservation uplink_pilot_phase(const ChannelRealization& channels,
                                     const PilotBook& pilots,
                                     const SystemConfig& config,
                                     const std::vector<arma::cx_mat>& group_noise);

UplinkObservation uplink_pilot_phase(const ChannelRealization& channels,
                                     const PilotBook& pilots,
                                     const SystemConfig& config,
                                     std::uint64_t noise_seed);

/// Per-(AP, user) MMSE estimates of the uplink channels and their entry-wise
/// second-order statistics.
struct UplinkEstimate {
  std::vector<arma::cx_mat> H_hat;  ///< per user, LN x M
  arma::mat gamma;                  ///< L x K estimate-entry variance
  arma::mat err_var;                ///< L x K error-entry variance, beta - gamma
  int ap_antennas = 1;
};

/// Scales each observation block by the per-entry Gaussian MMSE coefficient
///   c_lk = sqrt(q_k tau_p) beta_lk / (tau_p sum_{i in P_k} q_i beta_li + 1).
UplinkEstimate mmse_uplink_estimate(const UplinkObservation& obs,
                                    const Geometry& geometry,
                                    const PilotBook& pilots,
                                    const SystemConfig& config);

/// Debug dump of one realization: columns l,k,row,col,re,im.
void write_channel_csv(const ChannelRealization& channels, std::ostream& out);

}  // namespace cfmimo
