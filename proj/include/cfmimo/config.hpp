/**
 * @file config.hpp
 * @brief System configuration: dimensions, powers, fading model parameters.
 */
#pragma once

#include <string>
#include <vector>

namespace cfmimo {

/// Distance-based large-scale fading model,
///   beta[dB] = const_db - exponent * log10(d / 1 m) + shadowing,
/// with d the 3-D distance (horizontal distance plus AP/user height gap)
/// clamped to d_min_m, and log-normal shadowing of shadow_std_db.
struct PathLossParams {
  double const_db = -30.5;
  double exponent = 36.7;
  double shadow_std_db = 4.0;
  double height_m = 10.0;
  double d_min_m = 1.0;
};

enum class NormalizationPolicy {
  kCommonScalar,  ///< one scalar for all precoders; loudest AP hits the limit
  kPerApScalar,   ///< each AP rescaled individually to the limit
};

/// Tuning knobs that are not physical system parameters.
struct SimOptions {
  NormalizationPolicy normalization = NormalizationPolicy::kCommonScalar;
  /// Scale on the Gram + error-covariance term of the MMSE precoder.
  /// <= 0 selects the per-stream share dl_power / (num_users * user_antennas).
  double precoder_gram_scale = 0.0;
  /// LMMSE ridge: eps = ridge_scale * trace(C_y) / M^2 added to C_y.
  double ridge_scale = 1e-6;
  /// Combiner condition-number threshold beyond which a trial is an outage.
  double combiner_cond_limit = 1e12;
};

/// All scalar system parameters. Powers are linear and normalized by the
/// receiver noise power.
struct SystemConfig {
  int num_aps = 10;            ///< L
  int ap_antennas = 4;         ///< N
  int num_users = 5;           ///< K
  int user_antennas = 1;       ///< M
  int pilot_len = 0;           ///< tau_p; 0 derives num_pilot_matrices * M
  int coherence_len = 200;     ///< tau_c in symbols
  int num_pilot_matrices = 5;  ///< K'
  double ul_pilot_power = 2.5119e11;  ///< per-user uplink pilot SNR (100 mW over -94 dBm noise)
  double dl_power = 2.5119e12;        ///< per-AP downlink SNR constraint (1 W)
  double area_side_m = 1000.0;
  PathLossParams pathloss;
  SimOptions options;

  int pilot_len_or_default() const {
    return pilot_len > 0 ? pilot_len : num_pilot_matrices * user_antennas;
  }
  int total_ap_antennas() const { return num_aps * ap_antennas; }
  int users_per_pilot() const { return num_users / num_pilot_matrices; }
  double gram_scale_or_default() const {
    return options.precoder_gram_scale > 0.0
               ? options.precoder_gram_scale
               : dl_power / (static_cast<double>(num_users) * user_antennas);
  }

  /// Checks every invariant; returns one message per violation.
  std::vector<std::string> validate() const;

  /// Throws ConfigError listing all violations.
  void require_valid() const;
};

std::string to_string(NormalizationPolicy policy);
NormalizationPolicy normalization_from_string(const std::string& name);

}  // namespace cfmimo
