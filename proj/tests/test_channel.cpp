#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cfmimo/channel.hpp"
#include "cfmimo/rng.hpp"
#include "test_util.hpp"

using namespace cfmimo;

TEST_CASE("draw_channels: zero variance gives the zero matrix") {
  SystemConfig cfg = test::small_config(2, 2, 1, 2, 1);
  Geometry g = test::flat_geometry(cfg, 1.0);
  g.beta(0, 0) = 0.0;  // boundary allowed only in tests
  const auto ch = draw_channels(g, cfg, 1);
  CHECK(arma::norm(ch.block(0, 0), "fro") == 0.0);
  CHECK(arma::norm(ch.block(0, 1), "fro") > 0.0);
}

TEST_CASE("draw_channels: determinism under seed") {
  SystemConfig cfg = test::small_config(2, 2, 2, 2, 2);
  const Geometry g = test::flat_geometry(cfg, 0.5);
  const auto a = draw_channels(g, cfg, 99);
  const auto b = draw_channels(g, cfg, 99);
  for (std::size_t k = 0; k < a.H.size(); ++k) {
    CHECK(arma::approx_equal(a.H[k], b.H[k], "absdiff", 0.0));
  }
}

TEST_CASE("draw_channels: empirical entry variance matches the distribution") {
  // [DERIVED] Monte Carlo moment check: CN(0,1) entries, ensemble of 1e5.
  SystemConfig cfg = test::small_config(5, 5, 2, 2, 2);
  const Geometry g = test::flat_geometry(cfg, 1.0);
  double sum = 0.0;
  std::size_t n = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto ch = draw_channels(g, cfg, 10000 + static_cast<std::uint64_t>(t));
    for (const auto& h : ch.H) {
      sum += arma::accu(arma::square(arma::abs(h)));
      n += h.n_elem;
    }
  }
  REQUIRE(n >= 100000);
  const double var = sum / static_cast<double>(n);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("uplink pilots: contamination-free and noise-free observation") {
  SystemConfig cfg = test::small_config(2, 2, 2, 2, 2);  // singleton sharing sets
  const Geometry g = test::flat_geometry(cfg, 1.0);
  const PilotBook book = build_pilot_book(cfg, 3);
  const auto ch = draw_channels(g, cfg, 17);
  const auto obs = uplink_pilot_phase(ch, book, cfg, zero_uplink_noise(cfg));
  const double amp = std::sqrt(cfg.ul_pilot_power * cfg.pilot_len_or_default());
  for (int k = 0; k < cfg.num_users; ++k) {
    CHECK(test::rel_err(obs.Y[static_cast<std::size_t>(k)],
                        amp * ch.H[static_cast<std::size_t>(k)]) < 1e-14);
  }
}

TEST_CASE("uplink pilots: shared pilots superpose linearly") {
  SystemConfig cfg = test::small_config(2, 2, 2, 2, 1);  // both users share one matrix
  const Geometry g = test::flat_geometry(cfg, 1.0);
  const PilotBook book = build_pilot_book(cfg, 3);
  const auto ch = draw_channels(g, cfg, 17);
  const auto obs = uplink_pilot_phase(ch, book, cfg, zero_uplink_noise(cfg));
  const double amp = std::sqrt(cfg.ul_pilot_power * cfg.pilot_len_or_default());
  const arma::cx_mat want = amp * (ch.H[0] + ch.H[1]);
  CHECK(test::rel_err(obs.Y[0], want) < 1e-14);
  CHECK(test::rel_err(obs.Y[1], want) < 1e-14);
}

TEST_CASE("uplink pilots: matches the transmit-then-correlate oracle") {
  // [DERIVED] oracle: form Y_l^pilot = sum_i sqrt(q_i tau_p) H_li Phi_i^H + N_l
  // in the uncorrelated domain, then right-multiply by Phi_k.
  SystemConfig cfg = test::small_config(2, 3, 4, 2, 2);
  const Geometry g = test::flat_geometry(cfg, 0.7);
  const PilotBook book = test::random_unitary_pilot_book(cfg, 21);
  const auto ch = draw_channels(g, cfg, 23);

  const int tau_p = cfg.pilot_len_or_default();
  const int n = cfg.ap_antennas;
  const double amp = std::sqrt(cfg.ul_pilot_power * tau_p);
  Rng rng(31);

  // Correlated-domain noise consistent with the oracle's N_l.
  std::vector<arma::cx_mat> raw_noise;  // per AP, N x tau_p
  for (int l = 0; l < cfg.num_aps; ++l) {
    raw_noise.push_back(rng.cgaussian_mat(n, tau_p));
  }
  std::vector<arma::cx_mat> group_noise(
      static_cast<std::size_t>(cfg.num_pilot_matrices),
      arma::cx_mat(cfg.total_ap_antennas(), cfg.user_antennas));
  for (int m = 0; m < cfg.num_pilot_matrices; ++m) {
    for (int l = 0; l < cfg.num_aps; ++l) {
      group_noise[static_cast<std::size_t>(m)].rows(l * n, (l + 1) * n - 1) =
          raw_noise[static_cast<std::size_t>(l)] *
          book.matrices[static_cast<std::size_t>(m)];
    }
  }

  const auto obs = uplink_pilot_phase(ch, book, cfg, group_noise);

  for (int l = 0; l < cfg.num_aps; ++l) {
    arma::cx_mat y_pilot = raw_noise[static_cast<std::size_t>(l)];
    for (int i = 0; i < cfg.num_users; ++i) {
      y_pilot += amp * ch.block(i, l) * book.pilot_of(i).t();
    }
    for (int k = 0; k < cfg.num_users; ++k) {
      const arma::cx_mat oracle = y_pilot * book.pilot_of(k);
      const arma::cx_mat got =
          obs.Y[static_cast<std::size_t>(k)].rows(l * n, (l + 1) * n - 1);
      CHECK(test::rel_err(got, oracle) < 1e-10);
    }
  }
}

TEST_CASE("mmse estimate: asymptotically noise-free limit recovers the channel") {
  SystemConfig cfg = test::small_config(1, 2, 1, 2, 1);
  cfg.ul_pilot_power = 1e12;
  const Geometry g = test::flat_geometry(cfg, 1.0);
  const PilotBook book = build_pilot_book(cfg, 3);
  const auto ch = draw_channels(g, cfg, 5);
  const auto obs = uplink_pilot_phase(ch, book, cfg, 6);
  const auto est = mmse_uplink_estimate(obs, g, book, cfg);
  CHECK(test::rel_err(est.H_hat[0], ch.H[0]) < 1e-4);
  CHECK(est.gamma(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("mmse estimate: uninformative prior shrinks to zero") {
  SystemConfig cfg = test::small_config(1, 2, 2, 2, 2);
  Geometry g = test::flat_geometry(cfg, 1.0);
  g.beta(0, 0) = 0.0;
  const PilotBook book = build_pilot_book(cfg, 3);
  const auto ch = draw_channels(g, cfg, 5);
  const auto obs = uplink_pilot_phase(ch, book, cfg, 6);
  const auto est = mmse_uplink_estimate(obs, g, book, cfg);
  CHECK(arma::norm(est.H_hat[0].rows(0, 1), "fro") == 0.0);
  CHECK(est.gamma(0, 0) == 0.0);
  CHECK(est.err_var(0, 0) == 0.0);
}

TEST_CASE("mmse estimate: scalar case matches the jointly-Gaussian conditional mean") {
  // [DERIVED] oracle: assemble the 2-variable covariance of (h, y) and apply
  // the standard conditional-mean formula.
  SystemConfig cfg = test::small_config(1, 1, 2, 1, 1);  // N=M=1, one contaminator
  cfg.ul_pilot_power = 1.7;
  Geometry g = test::flat_geometry(cfg, 1.0);
  g.beta(0, 0) = 0.8;
  g.beta(0, 1) = 0.3;
  const PilotBook book = build_pilot_book(cfg, 3);
  const auto ch = draw_channels(g, cfg, 5);
  const auto obs = uplink_pilot_phase(ch, book, cfg, 6);
  const auto est = mmse_uplink_estimate(obs, g, book, cfg);

  const double q = cfg.ul_pilot_power;
  const double tau = cfg.pilot_len_or_default();
  const arma::cx_double y = obs.Y[0](0, 0);
  const double cov_hy = std::sqrt(q * tau) * g.beta(0, 0);
  const double var_y = q * tau * g.beta(0, 0) + q * tau * g.beta(0, 1) + 1.0;
  const arma::cx_double oracle = cov_hy / var_y * y;
  CHECK(std::abs(est.H_hat[0](0, 0) - oracle) < 1e-12);

  const double gamma_oracle = cov_hy * cov_hy / var_y;
  CHECK(est.gamma(0, 0) == doctest::Approx(gamma_oracle).epsilon(1e-12));
  CHECK(est.err_var(0, 0) ==
        doctest::Approx(g.beta(0, 0) - gamma_oracle).epsilon(1e-12));
}

TEST_CASE("mmse estimate: orthogonality principle and MSE optimality") {
  SystemConfig cfg = test::small_config(2, 1, 2, 1, 1);  // shared pilot
  cfg.ul_pilot_power = 2.0;
  Geometry g = test::flat_geometry(cfg, 1.0);
  g.beta(0, 0) = 0.9;
  g.beta(0, 1) = 0.4;
  g.beta(1, 0) = 0.2;
  g.beta(1, 1) = 0.6;
  const PilotBook book = build_pilot_book(cfg, 3);

  const std::size_t n_trials = 20000;
  arma::cx_double corr(0.0, 0.0);
  double mse = 0.0;
  double mse_up = 0.0;    // coefficient perturbed by +5%
  double mse_down = 0.0;  // coefficient perturbed by -5%
  double obs_power = 0.0;
  for (std::size_t t = 0; t < n_trials; ++t) {
    const auto seed = static_cast<std::uint64_t>(t);
    const auto ch = draw_channels(g, cfg, derive_seed(500, {seed, 1}));
    const auto obs = uplink_pilot_phase(ch, book, cfg, derive_seed(500, {seed, 2}));
    const auto est = mmse_uplink_estimate(obs, g, book, cfg);
    const arma::cx_double h = ch.H[0](0, 0);
    const arma::cx_double y = obs.Y[0](0, 0);
    const arma::cx_double h_hat = est.H_hat[0](0, 0);
    corr += (h - h_hat) * std::conj(y);
    mse += std::norm(h - h_hat);
    mse_up += std::norm(h - 1.05 * h_hat);
    mse_down += std::norm(h - 0.95 * h_hat);
    obs_power += std::norm(y);
  }
  const auto n = static_cast<double>(n_trials);
  corr /= n;
  mse /= n;
  mse_up /= n;
  mse_down /= n;
  obs_power /= n;

  // Error uncorrelated with the observation at the CLT rate.
  const double band = 4.0 * std::sqrt(obs_power * (g.beta(0, 0)) / n);
  CHECK(std::abs(corr) < band);

  // Empirical MSE equals beta - gamma, and the coefficient is locally optimal.
  const auto est0 = mmse_uplink_estimate(
      uplink_pilot_phase(draw_channels(g, cfg, 1), book, cfg, 2), g, book, cfg);
  const double predicted = est0.err_var(0, 0);
  CHECK(mse == doctest::Approx(predicted).epsilon(0.05));
  CHECK(mse < mse_up);
  CHECK(mse < mse_down);
}

TEST_CASE("mmse estimate: users on orthogonal pilots have independent estimates") {
  SystemConfig cfg = test::small_config(1, 1, 2, 1, 2);  // orthogonal pilots
  Geometry g = test::flat_geometry(cfg, 0.8);
  const PilotBook book = build_pilot_book(cfg, 3);
  const std::size_t n_trials = 20000;
  arma::cx_double cross(0.0, 0.0);
  double p0 = 0.0, p1 = 0.0;
  for (std::size_t t = 0; t < n_trials; ++t) {
    const auto seed = static_cast<std::uint64_t>(t);
    const auto ch = draw_channels(g, cfg, derive_seed(600, {seed, 1}));
    const auto obs = uplink_pilot_phase(ch, book, cfg, derive_seed(600, {seed, 2}));
    const auto est = mmse_uplink_estimate(obs, g, book, cfg);
    cross += est.H_hat[0](0, 0) * std::conj(est.H_hat[1](0, 0));
    p0 += std::norm(est.H_hat[0](0, 0));
    p1 += std::norm(est.H_hat[1](0, 0));
  }
  const auto n = static_cast<double>(n_trials);
  const double normalizer = std::sqrt((p0 / n) * (p1 / n));
  CHECK(std::abs(cross / n) / normalizer < 4.0 / std::sqrt(n));
}

TEST_CASE("channel csv dump has the documented schema") {
  SystemConfig cfg = test::small_config(2, 2, 1, 1, 1);
  const Geometry g = test::flat_geometry(cfg, 1.0);
  const auto ch = draw_channels(g, cfg, 3);
  std::ostringstream out;
  write_channel_csv(ch, out);
  CHECK(out.str().rfind("l,k,row,col,re,im\n", 0) == 0);
}
