#include "cfmimo/config.hpp"

#include <sstream>

#include "cfmimo/errors.hpp"

namespace cfmimo {

std::vector<std::string> SystemConfig::validate() const {
  std::vector<std::string> violations;
  auto bad = [&violations](const std::string& msg) { violations.push_back(msg); };

  if (num_aps < 1) bad("num_aps must be >= 1");
  if (ap_antennas < 1) bad("ap_antennas must be >= 1");
  if (num_users < 1) bad("num_users must be >= 1");
  if (user_antennas < 1) bad("user_antennas must be >= 1");
  if (num_pilot_matrices < 1) bad("num_pilot_matrices must be >= 1");
  if (coherence_len < 1) bad("coherence_len must be >= 1");
  if (!(ul_pilot_power > 0.0)) bad("ul_pilot_power must be > 0");
  if (!(dl_power > 0.0)) bad("dl_power must be > 0");
  if (!(area_side_m > 0.0)) bad("area_side_m must be > 0");
  if (!(pathloss.d_min_m > 0.0)) bad("pathloss.d_min_m must be > 0");
  if (pathloss.shadow_std_db < 0.0) bad("pathloss.shadow_std_db must be >= 0");
  if (pathloss.height_m < 0.0) bad("pathloss.height_m must be >= 0");

  if (num_pilot_matrices >= 1 && num_users >= 1) {
    if (num_pilot_matrices > num_users) {
      bad("num_pilot_matrices must be <= num_users");
    } else if (num_users % num_pilot_matrices != 0) {
      bad("num_users must be divisible by num_pilot_matrices (uniform pilot sharing groups)");
    }
  }

  const int tau_p = pilot_len_or_default();
  if (user_antennas >= 1 && num_pilot_matrices >= 1 &&
      tau_p != num_pilot_matrices * user_antennas) {
    std::ostringstream os;
    os << "pilot_len must equal num_pilot_matrices * user_antennas ("
       << num_pilot_matrices * user_antennas << "), got " << tau_p;
    bad(os.str());
  }
  if (2 * tau_p >= coherence_len) {
    std::ostringstream os;
    os << "coherence_len must exceed 2 * pilot_len (downlink-pilot pre-log "
          "factor must stay positive): 2*" << tau_p << " >= " << coherence_len;
    bad(os.str());
  }
  if (options.ridge_scale < 0.0) bad("options.ridge_scale must be >= 0");
  if (!(options.combiner_cond_limit > 0.0)) bad("options.combiner_cond_limit must be > 0");
  return violations;
}

void SystemConfig::require_valid() const {
  const auto violations = validate();
  if (violations.empty()) return;
  std::ostringstream os;
  os << "invalid configuration:";
  for (const auto& v : violations) os << "\n  - " << v;
  throw ConfigError(os.str());
}

std::string to_string(NormalizationPolicy policy) {
  switch (policy) {
    case NormalizationPolicy::kCommonScalar: return "common-scalar";
    case NormalizationPolicy::kPerApScalar: return "per-ap-scalar";
  }
  return "common-scalar";
}

NormalizationPolicy normalization_from_string(const std::string& name) {
  if (name == "common-scalar") return NormalizationPolicy::kCommonScalar;
  if (name == "per-ap-scalar") return NormalizationPolicy::kPerApScalar;
  throw ConfigError("unknown normalization policy: " + name);
}

}  // namespace cfmimo
