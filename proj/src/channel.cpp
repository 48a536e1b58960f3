#include "cfmimo/channel.hpp"

#include <cmath>
#include <ostream>

#include "cfmimo/rng.hpp"

namespace cfmimo {

ChannelRealization draw_channels(const Geometry& geometry,
                                 const SystemConfig& config,
                                 std::uint64_t seed) {
  const int num_aps = config.num_aps;
  const int num_users = config.num_users;
  const int n = config.ap_antennas;
  const int m = config.user_antennas;
  Rng rng(seed);

  ChannelRealization ch;
  ch.ap_antennas = n;
  ch.H.reserve(static_cast<std::size_t>(num_users));
  for (int k = 0; k < num_users; ++k) {
    arma::cx_mat h = rng.cgaussian_mat(static_cast<arma::uword>(num_aps * n),
                                       static_cast<arma::uword>(m));
    for (int l = 0; l < num_aps; ++l) {
      h.rows(static_cast<arma::uword>(l * n),
             static_cast<arma::uword>((l + 1) * n - 1)) *=
          std::sqrt(geometry.beta(l, k));
    }
    ch.H.push_back(std::move(h));
  }
  return ch;
}

std::vector<arma::cx_mat> draw_uplink_noise(const SystemConfig& config,
                                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<arma::cx_mat> noise;
  noise.reserve(static_cast<std::size_t>(config.num_pilot_matrices));
  for (int g = 0; g < config.num_pilot_matrices; ++g) {
    noise.push_back(rng.cgaussian_mat(
        static_cast<arma::uword>(config.total_ap_antennas()),
        static_cast<arma::uword>(config.user_antennas)));
  }
  return noise;
}

std::vector<arma::cx_mat> zero_uplink_noise(const SystemConfig& config) {
  std::vector<arma::cx_mat> noise;
  noise.reserve(static_cast<std::size_t>(config.num_pilot_matrices));
  for (int g = 0; g < config.num_pilot_matrices; ++g) {
    noise.emplace_back(static_cast<arma::uword>(config.total_ap_antennas()),
                       static_cast<arma::uword>(config.user_antennas),
                       arma::fill::zeros);
  }
  return noise;
}

UplinkObservation uplink_pilot_phase(const ChannelRealization& channels,
                                     const PilotBook& pilots,
                                     const SystemConfig& config,
                                     const std::vector<arma::cx_mat>& group_noise) {
  const double tau_p = config.pilot_len_or_default();
  const double amp = std::sqrt(config.ul_pilot_power * tau_p);

  UplinkObservation obs;
  obs.ap_antennas = config.ap_antennas;
  obs.Y.resize(static_cast<std::size_t>(config.num_users));

  // One observation per pilot group; users in the group share it.
  std::vector<arma::cx_mat> group_obs(static_cast<std::size_t>(config.num_pilot_matrices));
  for (int g = 0; g < config.num_pilot_matrices; ++g) {
    group_obs[static_cast<std::size_t>(g)] = group_noise[static_cast<std::size_t>(g)];
  }
  for (int i = 0; i < config.num_users; ++i) {
    const auto g = static_cast<std::size_t>(pilots.assignment[static_cast<std::size_t>(i)]);
    group_obs[g] += amp * channels.H[static_cast<std::size_t>(i)];
  }
  for (int k = 0; k < config.num_users; ++k) {
    obs.Y[static_cast<std::size_t>(k)] =
        group_obs[static_cast<std::size_t>(pilots.assignment[static_cast<std::size_t>(k)])];
  }
  return obs;
}

UplinkObservation uplink_pilot_phase(const ChannelRealization& channels,
                                     const PilotBook& pilots,
                                     const SystemConfig& config,
                                     std::uint64_t noise_seed) {
  return uplink_pilot_phase(channels, pilots, config,
                            draw_uplink_noise(config, noise_seed));
}

UplinkEstimate mmse_uplink_estimate(const UplinkObservation& obs,
                                    const Geometry& geometry,
                                    const PilotBook& pilots,
                                    const SystemConfig& config) {
  const int num_aps = config.num_aps;
  const int num_users = config.num_users;
  const int n = config.ap_antennas;
  const double tau_p = config.pilot_len_or_default();
  const double q = config.ul_pilot_power;

  UplinkEstimate est;
  est.ap_antennas = n;
  est.gamma.set_size(num_aps, num_users);
  est.err_var.set_size(num_aps, num_users);
  est.H_hat.resize(static_cast<std::size_t>(num_users));

  for (int k = 0; k < num_users; ++k) {
    const auto& sharing = pilots.sharing_sets[static_cast<std::size_t>(k)];
    arma::cx_mat h_hat = obs.Y[static_cast<std::size_t>(k)];
    for (int l = 0; l < num_aps; ++l) {
      double denom = 1.0;
      for (const int i : sharing) {
        denom += tau_p * q * geometry.beta(l, i);
      }
      const double beta = geometry.beta(l, k);
      const double coeff = std::sqrt(q * tau_p) * beta / denom;
      est.gamma(l, k) = q * tau_p * beta * beta / denom;
      est.err_var(l, k) = beta - est.gamma(l, k);
      h_hat.rows(static_cast<arma::uword>(l * n),
                 static_cast<arma::uword>((l + 1) * n - 1)) *= coeff;
    }
    est.H_hat[static_cast<std::size_t>(k)] = std::move(h_hat);
  }
  return est;
}

void write_channel_csv(const ChannelRealization& channels, std::ostream& out) {
  out << "l,k,row,col,re,im\n";
  const int n = channels.ap_antennas;
  for (std::size_t k = 0; k < channels.H.size(); ++k) {
    const auto& h = channels.H[k];
    for (arma::uword r = 0; r < h.n_rows; ++r) {
      for (arma::uword c = 0; c < h.n_cols; ++c) {
        out << r / static_cast<arma::uword>(n) << ',' << k << ','
            << r % static_cast<arma::uword>(n) << ',' << c << ','
            << h(r, c).real() << ',' << h(r, c).imag() << '\n';
      }
    }
  }
}

}  // namespace cfmimo
