/**
 * @file precoding.hpp
 * @brief Centralized MMSE precoding, per-AP power normalization, effective channels.
 */
#pragma once

#include <armadillo>
#include <vector>

#include "cfmimo/channel.hpp"
#include "cfmimo/config.hpp"

namespace cfmimo {

struct PrecoderSet {
  std::vector<arma::cx_mat> W;  ///< per user, LN x M
  std::vector<arma::cx_mat> Q;  ///< per user, M x M diagonal power matrix
  int ap_antennas = 1;

  arma::cx_mat block(int user, int ap) const {
    return W[static_cast<std::size_t>(user)].rows(
        static_cast<arma::uword>(ap * ap_antennas),
        static_cast<arma::uword>((ap + 1) * ap_antennas - 1));
  }
};

/// Unnormalized regularized MMSE precoder,
///   W_k = [ rho_s * sum_i (Hhat_i Hhat_i^H + C_i) + I_LN ]^-1 Hhat_k,
/// with C_i the diagonal uplink estimation-error covariance and rho_s the
/// per-stream power scale (SimOptions::precoder_gram_scale). Solved as one
/// Hermitian positive-definite linear system with K*M right-hand sides.
PrecoderSet mmse_precoder(const UplinkEstimate& est, const SystemConfig& config);

/// sum_k trace(W_lk Q_k W_lk^H) at AP l.
double per_ap_power(const PrecoderSet& prec, int ap);

/// Sets Q_k = I_M for every user and rescales the precoders so the per-AP
/// constraint holds: with the common-scalar policy one scalar brings the
/// loudest AP exactly to dl_power; with the per-AP policy every AP is scaled
/// individually to dl_power.
PrecoderSet normalize_and_allocate(const PrecoderSet& raw,
                                   const SystemConfig& config);

/// B[k][i] = H_k^H W_i, the M x M effective channel from precoder i to user k.
struct EffectiveChannelSet {
  std::vector<std::vector<arma::cx_mat>> B;  ///< [k][i], M x M
};

EffectiveChannelSet effective_channels(const ChannelRealization& channels,
                                       const PrecoderSet& prec);

}  // namespace cfmimo
