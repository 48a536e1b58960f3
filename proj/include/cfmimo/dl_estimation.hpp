/**
 * @file dl_estimation.hpp
 * @brief Downlink pilot phase, empirical effective-channel statistics,
 *        LMMSE estimation of the effective channel, and ZF combining.
 */
#pragma once

#include <armadillo>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cfmimo/precoding.hpp"

namespace cfmimo {

/// Pilot-correlated downlink observation, one M x M matrix per user.
struct DownlinkObservation {
  std::vector<arma::cx_mat> Y;
};

std::vector<arma::cx_mat> draw_downlink_noise(const SystemConfig& config,
                                              std::uint64_t seed);
std::vector<arma::cx_mat> zero_downlink_noise(const SystemConfig& config);

/// Ytilde_k = sqrt(tau_p) sum_{i in P_k} B_ki Q_i^{1/2} + N_k. The pilots are
/// precoded exactly like data, so the per-stream pilot power is the diagonal
/// of Q_i and the per-AP constraint carries over to pilot symbols.
DownlinkObservation dl_pilot_phase(const EffectiveChannelSet& eff,
                                   const PilotBook& pilots,
                                   const std::vector<arma::cx_mat>& Q,
                                   const SystemConfig& config,
                                   const std::vector<arma::cx_mat>& user_noise);

DownlinkObservation dl_pilot_phase(const EffectiveChannelSet& eff,
                                   const PilotBook& pilots,
                                   const std::vector<arma::cx_mat>& Q,
                                   const SystemConfig& config,
                                   std::uint64_t noise_seed);

/// Long-term second-order statistics of b = vec(B_kk) and the downlink pilot
/// observation y for one user. The unit-variance receiver noise enters C_y
/// analytically, so C_y >= I; the ridge is added only when solving.
struct EffChanStats {
  arma::cx_vec mean_b;
  arma::cx_vec mean_y;
  arma::cx_mat C_b;
  arma::cx_mat C_by;
  arma::cx_mat C_y;    ///< includes the +I noise term, excludes the ridge
  double ridge = 0.0;
  arma::cx_mat gain;   ///< C_by (C_y + ridge I)^-1
  arma::cx_mat C_err;  ///< C_b - gain C_by^H, Hermitian-symmetrized
  double mse = 0.0;    ///< trace(C_err)
  std::size_t sample_count = 0;
};

/// Mergeable moment accumulator over pairs (b, s) with s the noise-free
/// observation; shards can be summed before finalizing.
class EffStatsAccumulator {
 public:
  explicit EffStatsAccumulator(int m);
  void add(const arma::cx_vec& b, const arma::cx_vec& s);
  void merge(const EffStatsAccumulator& other);
  std::size_t count() const { return count_; }
  EffChanStats finalize(double ridge_scale) const;

 private:
  arma::cx_vec sum_b_, sum_s_;
  arma::cx_mat sum_bb_, sum_ss_, sum_bs_;
  std::size_t count_ = 0;
};

/// Pluggable precoding stage so tests can pin a deterministic precoder.
class PrecoderProvider {
 public:
  virtual ~PrecoderProvider() = default;
  virtual PrecoderSet operator()(const ChannelRealization& channels,
                                 const Geometry& geometry,
                                 const PilotBook& pilots,
                                 const SystemConfig& config,
                                 std::uint64_t seed) const = 0;
};

/// Production pipeline: uplink pilots -> MMSE estimate -> MMSE precoder ->
/// per-AP normalization.
class MmsePipeline : public PrecoderProvider {
 public:
  PrecoderSet operator()(const ChannelRealization& channels,
                         const Geometry& geometry, const PilotBook& pilots,
                         const SystemConfig& config,
                         std::uint64_t seed) const override;
};

class FixedPrecoder : public PrecoderProvider {
 public:
  explicit FixedPrecoder(PrecoderSet prec) : prec_(std::move(prec)) {}
  PrecoderSet operator()(const ChannelRealization&, const Geometry&,
                         const PilotBook&, const SystemConfig&,
                         std::uint64_t) const override {
    return prec_;
  }

 private:
  PrecoderSet prec_;
};

/// Runs n_stat independent realizations through the precoding pipeline and
/// accumulates the per-user statistics needed by the LMMSE estimator.
/// Requires n_stat >= 10 M^2 for covariance conditioning.
std::vector<EffChanStats> calibrate_eff_stats(const SystemConfig& config,
                                              const Geometry& geometry,
                                              const PilotBook& pilots,
                                              int n_stat, std::uint64_t seed,
                                              const PrecoderProvider& provider);

std::vector<EffChanStats> calibrate_eff_stats(const SystemConfig& config,
                                              const Geometry& geometry,
                                              const PilotBook& pilots,
                                              int n_stat, std::uint64_t seed);

struct DownlinkEstimate {
  arma::cx_vec b_hat;
  arma::cx_mat B_hat;  ///< M x M matrix form
  arma::cx_mat C_err;
  double mse = 0.0;
};

/// Rebuilds gain, C_err and mse from the mean/covariance fields and the
/// ridge; used after loading stats from disk or assembling them directly.
void compute_estimator_fields(EffChanStats& stats);

/// b_hat = mean_b + C_by (C_y + ridge I)^-1 (y - mean_y); the error covariance
/// is the Hermitian-symmetrized Schur complement carried by the stats.
DownlinkEstimate lmmse_estimate(const arma::cx_vec& y, const EffChanStats& stats);

struct Combiner {
  arma::cx_mat U_H;     ///< applied from the left
  bool flagged = false; ///< rank-deficient estimate; trial counts as outage
  double cond = 0.0;
};

/// ZF combining U^H = (Bhat^H Bhat)^-1 Bhat^H; flags the trial instead of
/// falling back to a pseudo-inverse when Bhat is near singular.
Combiner zf_combiner(const DownlinkEstimate& est, double cond_limit = 1e12);

/// CSV export/import of calibrated statistics (all users of one geometry).
void save_eff_stats_csv(const std::vector<EffChanStats>& stats, std::ostream& out);
std::vector<EffChanStats> load_eff_stats_csv(std::istream& in);

}  // namespace cfmimo
