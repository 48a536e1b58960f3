/**
 * @file se_bounds.hpp
 * @brief Spectral-efficiency bounds: hardening bound without receiver CSI,
 *        perfect-CSI bound, and the downlink-pilot + ZF bound.
 */
#pragma once

#include <armadillo>
#include <cstdint>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/precoding.hpp"

namespace cfmimo {

enum class BoundKind { kNoCsi, kPerfectCsi, kDlPilots };

const char* bound_name(BoundKind kind);

struct SeResult {
  arma::vec per_user_se;      ///< bit/s/Hz
  arma::vec per_user_stderr;  ///< Monte Carlo standard error (0 if analytic)
  double sum_se = 0.0;
  double prelog = 0.0;
  BoundKind kind = BoundKind::kNoCsi;
};

/// log2 det(I + Q^{1/2} G^H Xi^{-1} G Q^{1/2}) through a Cholesky
/// factorization of Xi; throws SimError when Xi is not positive definite.
double log2det_capacity(const arma::cx_mat& Q, const arma::cx_mat& G,
                        const arma::cx_mat& Xi);

/// Sample mean of B_kk over the realization ensemble.
arma::cx_mat mean_effective_channel(const std::vector<EffectiveChannelSet>& ensemble,
                                    int user);

/// Xi_k = E{(B_kk - Bbar) Q_k (B_kk - Bbar)^H} + sum_{i != k} E{B_ki Q_i B_ki^H} + I,
/// sample-averaged and Hermitian-symmetrized.
arma::cx_mat hardening_noise_cov(const std::vector<EffectiveChannelSet>& ensemble,
                                 int user, const std::vector<arma::cx_mat>& Q,
                                 const arma::cx_mat& B_bar);

/// Hardening bound: (1 - tau_p/tau_c) log2 det(I + Q Bbar^H Xi^-1 Bbar).
double se_no_csi(const arma::cx_mat& B_bar, const arma::cx_mat& Xi,
                 const arma::cx_mat& Qk, const SystemConfig& config);

/// Perfect-CSI bound: Monte Carlo mean over realizations of
/// log2 det(I + Q B_kk^H Xitilde^-1 B_kk) with
/// Xitilde = sum_{i != k} B_ki Q_i B_ki^H + I, times (1 - tau_p/tau_c).
double se_perfect_csi(const std::vector<EffectiveChannelSet>& ensemble, int user,
                      const std::vector<arma::cx_mat>& Q,
                      const SystemConfig& config, double* stderr_out = nullptr);

/// Covariance of the post-combining interference-plus-noise term:
/// E{ U^H (Btilde Q_k Btilde^H + sum_{i != k} B_ki Q_i B_ki^H + I) U },
/// averaged over the kept (non-outage) trials.
arma::cx_mat zf_noise_cov(const std::vector<EffectiveChannelSet>& ensemble,
                          const std::vector<arma::cx_mat>& U_H,
                          const std::vector<arma::cx_mat>& B_hat,
                          const std::vector<std::size_t>& trial_idx, int user,
                          const std::vector<arma::cx_mat>& Q);

/// Downlink-pilot + ZF bound: (1 - 2 tau_p/tau_c) log2 det(I + Q C^-1).
double se_dl_pilots(const arma::cx_mat& C_nprime, const arma::cx_mat& Qk,
                    const SystemConfig& config);

/// Per-antenna-count concentration statistics of the normalized effective
/// channel of a single-user maximum-ratio link: diag entries are
/// ||h_m||^2 / E||h_m||^2, cross entries are h_m^H h_m' / E||h_m||^2.
struct HardeningRow {
  int n_antennas = 0;
  double diag_mean = 0.0;
  double diag_var = 0.0;
  double cross_mean_abs = 0.0;
  double cross_var = 0.0;
};

std::vector<HardeningRow> hardening_diagnostic(const std::vector<int>& n_values,
                                               int m, std::size_t n_samples,
                                               std::uint64_t seed);

}  // namespace cfmimo
