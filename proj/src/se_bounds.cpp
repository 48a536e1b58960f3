#include "cfmimo/se_bounds.hpp"

#include <cmath>

#include "cfmimo/errors.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

const char* bound_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::kNoCsi: return "no_csi";
    case BoundKind::kPerfectCsi: return "perfect_csi";
    case BoundKind::kDlPilots: return "dl_pilots";
  }
  return "unknown";
}

double log2det_capacity(const arma::cx_mat& Q, const arma::cx_mat& G,
                        const arma::cx_mat& Xi) {
  arma::cx_mat chol_lower;
  const arma::cx_mat sym = 0.5 * (Xi + Xi.t());
  if (!arma::chol(chol_lower, sym, "lower")) {
    throw SimError("log2det_capacity: noise covariance is not positive definite");
  }
  // V = L^-1 G, so G^H Xi^-1 G = V^H V is Hermitian PSD by construction.
  const arma::cx_mat v = arma::solve(arma::trimatl(chol_lower), G);
  const arma::cx_mat q_half = arma::sqrt(Q);
  arma::cx_mat inner = q_half.t() * (v.t() * v) * q_half;
  inner = 0.5 * (inner + inner.t());
  inner.diag() += 1.0;

  double log_det = 0.0;
  if (!arma::log_det_sympd(log_det, inner)) {
    throw SimError("log2det_capacity: I + Q^1/2 S Q^1/2 not positive definite");
  }
  return log_det / std::log(2.0);
}

arma::cx_mat mean_effective_channel(const std::vector<EffectiveChannelSet>& ensemble,
                                    int user) {
  if (ensemble.empty()) {
    throw SimError("mean_effective_channel: empty ensemble");
  }
  const auto ku = static_cast<std::size_t>(user);
  arma::cx_mat sum(arma::size(ensemble.front().B[ku][ku]), arma::fill::zeros);
  for (const auto& eff : ensemble) {
    sum += eff.B[ku][ku];
  }
  return sum / static_cast<double>(ensemble.size());
}

arma::cx_mat hardening_noise_cov(const std::vector<EffectiveChannelSet>& ensemble,
                                 int user, const std::vector<arma::cx_mat>& Q,
                                 const arma::cx_mat& B_bar) {
  const auto ku = static_cast<std::size_t>(user);
  const arma::uword m = B_bar.n_rows;
  arma::cx_mat xi(m, m, arma::fill::zeros);
  for (const auto& eff : ensemble) {
    const arma::cx_mat centered = eff.B[ku][ku] - B_bar;
    xi += centered * Q[ku] * centered.t();
    for (std::size_t i = 0; i < eff.B[ku].size(); ++i) {
      if (i == ku) continue;
      xi += eff.B[ku][i] * Q[i] * eff.B[ku][i].t();
    }
  }
  xi /= static_cast<double>(ensemble.size());
  xi.diag() += 1.0;
  return 0.5 * (xi + xi.t());
}

double se_no_csi(const arma::cx_mat& B_bar, const arma::cx_mat& Xi,
                 const arma::cx_mat& Qk, const SystemConfig& config) {
  const double prelog = 1.0 - static_cast<double>(config.pilot_len_or_default()) /
                                  config.coherence_len;
  return prelog * log2det_capacity(Qk, B_bar, Xi);
}

double se_perfect_csi(const std::vector<EffectiveChannelSet>& ensemble, int user,
                      const std::vector<arma::cx_mat>& Q,
                      const SystemConfig& config, double* stderr_out) {
  if (ensemble.empty()) {
    throw SimError("se_perfect_csi: empty ensemble");
  }
  const auto ku = static_cast<std::size_t>(user);
  const arma::uword m = ensemble.front().B[ku][ku].n_rows;
  const double prelog = 1.0 - static_cast<double>(config.pilot_len_or_default()) /
                                  config.coherence_len;

  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& eff : ensemble) {
    arma::cx_mat xi(m, m, arma::fill::zeros);
    for (std::size_t i = 0; i < eff.B[ku].size(); ++i) {
      if (i == ku) continue;
      xi += eff.B[ku][i] * Q[i] * eff.B[ku][i].t();
    }
    xi.diag() += 1.0;
    const double v = log2det_capacity(Q[ku], eff.B[ku][ku], xi);
    sum += v;
    sum_sq += v * v;
  }
  const auto n = static_cast<double>(ensemble.size());
  const double mean = sum / n;
  if (stderr_out != nullptr) {
    const double var = (n > 1.0) ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0))
                                 : 0.0;
    *stderr_out = prelog * std::sqrt(var / n);
  }
  return prelog * mean;
}

arma::cx_mat zf_noise_cov(const std::vector<EffectiveChannelSet>& ensemble,
                          const std::vector<arma::cx_mat>& U_H,
                          const std::vector<arma::cx_mat>& B_hat,
                          const std::vector<std::size_t>& trial_idx, int user,
                          const std::vector<arma::cx_mat>& Q) {
  if (trial_idx.empty()) {
    throw SimError("zf_noise_cov: no trials kept");
  }
  const auto ku = static_cast<std::size_t>(user);
  const arma::uword m = U_H.front().n_rows;
  arma::cx_mat cov(m, m, arma::fill::zeros);
  for (std::size_t t = 0; t < trial_idx.size(); ++t) {
    const auto& eff = ensemble[trial_idx[t]];
    const arma::cx_mat err = eff.B[ku][ku] - B_hat[t];
    arma::cx_mat inner = err * Q[ku] * err.t();
    for (std::size_t i = 0; i < eff.B[ku].size(); ++i) {
      if (i == ku) continue;
      inner += eff.B[ku][i] * Q[i] * eff.B[ku][i].t();
    }
    inner.diag() += 1.0;
    cov += U_H[t] * inner * U_H[t].t();
  }
  cov /= static_cast<double>(trial_idx.size());
  return 0.5 * (cov + cov.t());
}

double se_dl_pilots(const arma::cx_mat& C_nprime, const arma::cx_mat& Qk,
                    const SystemConfig& config) {
  const double prelog = 1.0 - 2.0 * static_cast<double>(config.pilot_len_or_default()) /
                                  config.coherence_len;
  const arma::cx_mat eye(arma::size(C_nprime), arma::fill::eye);
  return prelog * log2det_capacity(Qk, eye, C_nprime);
}

std::vector<HardeningRow> hardening_diagnostic(const std::vector<int>& n_values,
                                               int m, std::size_t n_samples,
                                               std::uint64_t seed) {
  std::vector<HardeningRow> rows;
  rows.reserve(n_values.size());
  for (const int n : n_values) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(n)}));
    const double mean_norm = static_cast<double>(n);  // E||h||^2 for CN(0,1) entries

    double diag_sum = 0.0, diag_sq = 0.0;
    arma::cx_double cross_sum(0.0, 0.0);
    double cross_abs_sum = 0.0, cross_sq = 0.0;
    std::size_t cross_count = 0;
    for (std::size_t t = 0; t < n_samples; ++t) {
      const arma::cx_mat h = rng.cgaussian_mat(static_cast<arma::uword>(n),
                                               static_cast<arma::uword>(m));
      for (int c = 0; c < m; ++c) {
        const double r = std::pow(arma::norm(h.col(static_cast<arma::uword>(c))), 2) /
                         mean_norm;
        diag_sum += r;
        diag_sq += r * r;
      }
      for (int c = 0; c < m; ++c) {
        for (int c2 = c + 1; c2 < m; ++c2) {
          const arma::cx_double x =
              arma::cdot(h.col(static_cast<arma::uword>(c)),
                         h.col(static_cast<arma::uword>(c2))) / mean_norm;
          cross_sum += x;
          cross_abs_sum += std::abs(x);
          cross_sq += std::norm(x);
          ++cross_count;
        }
      }
    }
    const double diag_n = static_cast<double>(n_samples) * m;
    HardeningRow row;
    row.n_antennas = n;
    row.diag_mean = diag_sum / diag_n;
    row.diag_var = diag_sq / diag_n - row.diag_mean * row.diag_mean;
    if (cross_count > 0) {
      const auto cn = static_cast<double>(cross_count);
      const arma::cx_double cross_mean = cross_sum / cn;
      row.cross_mean_abs = std::abs(cross_mean);
      row.cross_var = cross_sq / cn - std::norm(cross_mean);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cfmimo
