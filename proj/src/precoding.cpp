#include "cfmimo/precoding.hpp"

#include <cmath>

#include "cfmimo/errors.hpp"

namespace cfmimo {

PrecoderSet mmse_precoder(const UplinkEstimate& est, const SystemConfig& config) {
  const int num_users = config.num_users;
  const int n = config.ap_antennas;
  const int m = config.user_antennas;
  const auto total = static_cast<arma::uword>(config.total_ap_antennas());
  const double rho_s = config.gram_scale_or_default();

  arma::cx_mat gram(total, total, arma::fill::eye);
  for (int i = 0; i < num_users; ++i) {
    const auto& h = est.H_hat[static_cast<std::size_t>(i)];
    gram += rho_s * (h * h.t());
    for (int l = 0; l < config.num_aps; ++l) {
      const double e = rho_s * est.err_var(l, i);
      for (int a = 0; a < n; ++a) {
        gram(static_cast<arma::uword>(l * n + a),
             static_cast<arma::uword>(l * n + a)) += e;
      }
    }
  }

  arma::cx_mat rhs(total, static_cast<arma::uword>(num_users * m));
  for (int k = 0; k < num_users; ++k) {
    rhs.cols(static_cast<arma::uword>(k * m),
             static_cast<arma::uword>((k + 1) * m - 1)) =
        est.H_hat[static_cast<std::size_t>(k)];
  }

  arma::cx_mat solution;
  const bool ok = arma::solve(solution, gram, rhs,
                              arma::solve_opts::likely_sympd + arma::solve_opts::no_approx);
  if (!ok) {
    throw SimError("mmse_precoder: regularized Gram matrix is numerically singular");
  }

  PrecoderSet prec;
  prec.ap_antennas = n;
  prec.W.resize(static_cast<std::size_t>(num_users));
  prec.Q.resize(static_cast<std::size_t>(num_users));
  for (int k = 0; k < num_users; ++k) {
    prec.W[static_cast<std::size_t>(k)] =
        solution.cols(static_cast<arma::uword>(k * m),
                      static_cast<arma::uword>((k + 1) * m - 1));
    prec.Q[static_cast<std::size_t>(k)] =
        arma::cx_mat(static_cast<arma::uword>(m), static_cast<arma::uword>(m),
                     arma::fill::eye);
  }
  return prec;
}

double per_ap_power(const PrecoderSet& prec, int ap) {
  const int n = prec.ap_antennas;
  double power = 0.0;
  for (std::size_t k = 0; k < prec.W.size(); ++k) {
    const arma::cx_mat block = prec.W[k].rows(static_cast<arma::uword>(ap * n),
                                              static_cast<arma::uword>((ap + 1) * n - 1));
    power += std::real(arma::trace(block * prec.Q[k] * block.t()));
  }
  return power;
}

PrecoderSet normalize_and_allocate(const PrecoderSet& raw,
                                   const SystemConfig& config) {
  PrecoderSet out = raw;
  for (auto& q : out.Q) {
    q = arma::cx_mat(static_cast<arma::uword>(config.user_antennas),
                     static_cast<arma::uword>(config.user_antennas),
                     arma::fill::eye);
  }

  const int num_aps = config.num_aps;
  arma::vec power(static_cast<arma::uword>(num_aps));
  for (int l = 0; l < num_aps; ++l) {
    power(static_cast<arma::uword>(l)) = per_ap_power(out, l);
  }
  if (power.max() <= 0.0) {
    throw SimError("normalize_and_allocate: all-zero precoder set");
  }

  if (config.options.normalization == NormalizationPolicy::kCommonScalar) {
    const double alpha = std::sqrt(config.dl_power / power.max());
    for (auto& w : out.W) w *= alpha;
  } else {
    const int n = config.ap_antennas;
    for (int l = 0; l < num_aps; ++l) {
      const double p = power(static_cast<arma::uword>(l));
      if (p <= 0.0) continue;
      const double alpha = std::sqrt(config.dl_power / p);
      for (auto& w : out.W) {
        w.rows(static_cast<arma::uword>(l * n),
               static_cast<arma::uword>((l + 1) * n - 1)) *= alpha;
      }
    }
  }
  return out;
}

EffectiveChannelSet effective_channels(const ChannelRealization& channels,
                                       const PrecoderSet& prec) {
  const auto num_users = channels.H.size();
  EffectiveChannelSet eff;
  eff.B.resize(num_users);
  for (std::size_t k = 0; k < num_users; ++k) {
    const arma::cx_mat hk_h = channels.H[k].t();
    eff.B[k].resize(prec.W.size());
    for (std::size_t i = 0; i < prec.W.size(); ++i) {
      eff.B[k][i] = hk_h * prec.W[i];
    }
  }
  return eff;
}

}  // namespace cfmimo
