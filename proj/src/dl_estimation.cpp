#include "cfmimo/dl_estimation.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "cfmimo/errors.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

std::vector<arma::cx_mat> draw_downlink_noise(const SystemConfig& config,
                                              std::uint64_t seed) {
  Rng rng(seed);
  const auto m = static_cast<arma::uword>(config.user_antennas);
  std::vector<arma::cx_mat> noise;
  noise.reserve(static_cast<std::size_t>(config.num_users));
  for (int k = 0; k < config.num_users; ++k) {
    noise.push_back(rng.cgaussian_mat(m, m));
  }
  return noise;
}

std::vector<arma::cx_mat> zero_downlink_noise(const SystemConfig& config) {
  const auto m = static_cast<arma::uword>(config.user_antennas);
  return std::vector<arma::cx_mat>(static_cast<std::size_t>(config.num_users),
                                   arma::cx_mat(m, m, arma::fill::zeros));
}

DownlinkObservation dl_pilot_phase(const EffectiveChannelSet& eff,
                                   const PilotBook& pilots,
                                   const std::vector<arma::cx_mat>& Q,
                                   const SystemConfig& config,
                                   const std::vector<arma::cx_mat>& user_noise) {
  const double root_tau = std::sqrt(static_cast<double>(config.pilot_len_or_default()));
  DownlinkObservation obs;
  obs.Y.resize(static_cast<std::size_t>(config.num_users));
  for (int k = 0; k < config.num_users; ++k) {
    arma::cx_mat y = user_noise[static_cast<std::size_t>(k)];
    for (const int i : pilots.sharing_sets[static_cast<std::size_t>(k)]) {
      y += root_tau * eff.B[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
           arma::sqrt(Q[static_cast<std::size_t>(i)]);
    }
    obs.Y[static_cast<std::size_t>(k)] = std::move(y);
  }
  return obs;
}

DownlinkObservation dl_pilot_phase(const EffectiveChannelSet& eff,
                                   const PilotBook& pilots,
                                   const std::vector<arma::cx_mat>& Q,
                                   const SystemConfig& config,
                                   std::uint64_t noise_seed) {
  return dl_pilot_phase(eff, pilots, Q, config,
                        draw_downlink_noise(config, noise_seed));
}

EffStatsAccumulator::EffStatsAccumulator(int m) {
  const auto d = static_cast<arma::uword>(m) * static_cast<arma::uword>(m);
  sum_b_.zeros(d);
  sum_s_.zeros(d);
  sum_bb_.zeros(d, d);
  sum_ss_.zeros(d, d);
  sum_bs_.zeros(d, d);
}

void EffStatsAccumulator::add(const arma::cx_vec& b, const arma::cx_vec& s) {
  sum_b_ += b;
  sum_s_ += s;
  sum_bb_ += b * b.t();
  sum_ss_ += s * s.t();
  sum_bs_ += b * s.t();
  ++count_;
}

void EffStatsAccumulator::merge(const EffStatsAccumulator& other) {
  sum_b_ += other.sum_b_;
  sum_s_ += other.sum_s_;
  sum_bb_ += other.sum_bb_;
  sum_ss_ += other.sum_ss_;
  sum_bs_ += other.sum_bs_;
  count_ += other.count_;
}

void compute_estimator_fields(EffChanStats& stats) {
  arma::cx_mat regularized = stats.C_y;
  regularized.diag() += stats.ridge;
  regularized = 0.5 * (regularized + regularized.t());

  arma::cx_mat x;
  const bool ok = arma::solve(x, regularized, stats.C_by.t(),
                              arma::solve_opts::likely_sympd + arma::solve_opts::no_approx);
  if (!ok) {
    throw SimError("lmmse statistics: observation covariance singular after ridge");
  }
  stats.gain = x.t();
  arma::cx_mat err = stats.C_b - stats.gain * stats.C_by.t();
  stats.C_err = 0.5 * (err + err.t());
  stats.mse = std::real(arma::trace(stats.C_err));
}

EffChanStats EffStatsAccumulator::finalize(double ridge_scale) const {
  if (count_ < 2) {
    throw SimError("EffStatsAccumulator: need at least 2 samples");
  }
  const auto n = static_cast<double>(count_);
  const arma::uword d = sum_b_.n_elem;

  EffChanStats stats;
  stats.sample_count = count_;
  stats.mean_b = sum_b_ / n;
  stats.mean_y = sum_s_ / n;
  const double scale = 1.0 / (n - 1.0);
  stats.C_b = scale * (sum_bb_ - n * (stats.mean_b * stats.mean_b.t()));
  stats.C_by = scale * (sum_bs_ - n * (stats.mean_b * stats.mean_y.t()));
  stats.C_y = scale * (sum_ss_ - n * (stats.mean_y * stats.mean_y.t()));
  stats.C_b = 0.5 * (stats.C_b + stats.C_b.t());
  stats.C_y = 0.5 * (stats.C_y + stats.C_y.t());
  stats.C_y.diag() += 1.0;  // unit-variance receiver noise, independent of b
  stats.ridge = ridge_scale * std::real(arma::trace(stats.C_y)) / static_cast<double>(d);
  compute_estimator_fields(stats);
  return stats;
}

PrecoderSet MmsePipeline::operator()(const ChannelRealization& channels,
                                     const Geometry& geometry,
                                     const PilotBook& pilots,
                                     const SystemConfig& config,
                                     std::uint64_t seed) const {
  const auto obs = uplink_pilot_phase(channels, pilots, config,
                                      derive_seed(seed, {stream::kUplinkNoise}));
  const auto est = mmse_uplink_estimate(obs, geometry, pilots, config);
  return normalize_and_allocate(mmse_precoder(est, config), config);
}

std::vector<EffChanStats> calibrate_eff_stats(const SystemConfig& config,
                                              const Geometry& geometry,
                                              const PilotBook& pilots,
                                              int n_stat, std::uint64_t seed,
                                              const PrecoderProvider& provider) {
  const int m = config.user_antennas;
  if (n_stat < 10 * m * m) {
    std::ostringstream os;
    os << "calibrate_eff_stats: n_stat = " << n_stat << " too small, need >= "
       << 10 * m * m << " for an M = " << m << " covariance estimate";
    throw SimError(os.str());
  }

  const double root_tau = std::sqrt(static_cast<double>(config.pilot_len_or_default()));
  std::vector<EffStatsAccumulator> acc(static_cast<std::size_t>(config.num_users),
                                       EffStatsAccumulator(m));
  for (int t = 0; t < n_stat; ++t) {
    const std::uint64_t trial_seed = derive_seed(seed, {static_cast<std::uint64_t>(t)});
    const auto channels = draw_channels(geometry, config,
                                        derive_seed(trial_seed, {stream::kChannel}));
    const auto prec = provider(channels, geometry, pilots, config, trial_seed);
    const auto eff = effective_channels(channels, prec);
    for (int k = 0; k < config.num_users; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      arma::cx_vec s(static_cast<arma::uword>(m) * static_cast<arma::uword>(m),
                     arma::fill::zeros);
      for (const int i : pilots.sharing_sets[ku]) {
        const auto iu = static_cast<std::size_t>(i);
        s += root_tau * arma::vectorise(eff.B[ku][iu] * arma::sqrt(prec.Q[iu]));
      }
      acc[ku].add(arma::vectorise(eff.B[ku][ku]), s);
    }
  }

  std::vector<EffChanStats> stats;
  stats.reserve(acc.size());
  for (const auto& a : acc) {
    stats.push_back(a.finalize(config.options.ridge_scale));
  }
  return stats;
}

std::vector<EffChanStats> calibrate_eff_stats(const SystemConfig& config,
                                              const Geometry& geometry,
                                              const PilotBook& pilots,
                                              int n_stat, std::uint64_t seed) {
  return calibrate_eff_stats(config, geometry, pilots, n_stat, seed, MmsePipeline{});
}

DownlinkEstimate lmmse_estimate(const arma::cx_vec& y, const EffChanStats& stats) {
  DownlinkEstimate est;
  est.b_hat = stats.mean_b + stats.gain * (y - stats.mean_y);
  const auto m = static_cast<arma::uword>(
      std::lround(std::sqrt(static_cast<double>(est.b_hat.n_elem))));
  est.B_hat = arma::reshape(est.b_hat, m, m);
  est.C_err = stats.C_err;
  est.mse = stats.mse;
  return est;
}

Combiner zf_combiner(const DownlinkEstimate& est, double cond_limit) {
  Combiner comb;
  const arma::vec sv = arma::svd(est.B_hat);
  const double smax = sv.max();
  const double smin = sv.min();
  comb.cond = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(smin > 0.0) || comb.cond > cond_limit || !std::isfinite(smax)) {
    comb.flagged = true;
    comb.U_H.zeros(est.B_hat.n_rows, est.B_hat.n_cols);
    return comb;
  }
  arma::cx_mat u;
  const bool ok = arma::solve(u, est.B_hat.t() * est.B_hat, est.B_hat.t(),
                              arma::solve_opts::likely_sympd + arma::solve_opts::no_approx);
  if (!ok) {
    comb.flagged = true;
    comb.U_H.zeros(est.B_hat.n_rows, est.B_hat.n_cols);
    return comb;
  }
  comb.U_H = std::move(u);
  return comb;
}

namespace {

void write_cx_block(std::ostream& out, int user, const char* name,
                    const arma::cx_mat& m) {
  for (arma::uword c = 0; c < m.n_cols; ++c) {
    for (arma::uword r = 0; r < m.n_rows; ++r) {
      out << user << ',' << name << ',' << r << ',' << c << ','
          << m(r, c).real() << ',' << m(r, c).imag() << '\n';
    }
  }
}

}  // namespace

void save_eff_stats_csv(const std::vector<EffChanStats>& stats, std::ostream& out) {
  const auto old_precision = out.precision(17);
  out << "user,block,row,col,re,im\n";
  for (std::size_t k = 0; k < stats.size(); ++k) {
    const auto& s = stats[k];
    const int user = static_cast<int>(k);
    out << user << ",ridge,0,0," << s.ridge << ",0\n";
    out << user << ",samples,0,0," << static_cast<double>(s.sample_count) << ",0\n";
    write_cx_block(out, user, "mean_b", arma::cx_mat(s.mean_b));
    write_cx_block(out, user, "mean_y", arma::cx_mat(s.mean_y));
    write_cx_block(out, user, "C_b", s.C_b);
    write_cx_block(out, user, "C_by", s.C_by);
    write_cx_block(out, user, "C_y", s.C_y);
  }
  out.precision(old_precision);
}

std::vector<EffChanStats> load_eff_stats_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "user,block,row,col,re,im") {
    throw IoError("eff-stats csv: bad header");
  }
  std::vector<EffChanStats> stats;
  auto ensure_user = [&stats](int user) -> EffChanStats& {
    if (static_cast<std::size_t>(user) >= stats.size()) {
      stats.resize(static_cast<std::size_t>(user) + 1);
    }
    return stats[static_cast<std::size_t>(user)];
  };
  auto ensure_dim = [](arma::cx_mat& m, arma::uword r, arma::uword c) {
    if (m.n_rows <= r || m.n_cols <= c) {
      arma::cx_mat grown(std::max(m.n_rows, r + 1), std::max(m.n_cols, c + 1),
                         arma::fill::zeros);
      if (m.n_elem > 0) grown.submat(0, 0, m.n_rows - 1, m.n_cols - 1) = m;
      m = std::move(grown);
    }
  };

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 6) throw IoError("eff-stats csv: bad row: " + line);
    const int user = std::stoi(fields[0]);
    const std::string& block = fields[1];
    const auto r = static_cast<arma::uword>(std::stoul(fields[2]));
    const auto c = static_cast<arma::uword>(std::stoul(fields[3]));
    const arma::cx_double value(std::stod(fields[4]), std::stod(fields[5]));
    auto& s = ensure_user(user);
    if (block == "ridge") {
      s.ridge = value.real();
    } else if (block == "samples") {
      s.sample_count = static_cast<std::size_t>(value.real());
    } else if (block == "mean_b" || block == "mean_y") {
      auto& v = (block == "mean_b") ? s.mean_b : s.mean_y;
      if (v.n_elem <= r) v.resize(r + 1);
      v(r) = value;
    } else if (block == "C_b" || block == "C_by" || block == "C_y") {
      auto& m = (block == "C_b") ? s.C_b : (block == "C_by") ? s.C_by : s.C_y;
      ensure_dim(m, r, c);
      m(r, c) = value;
    } else {
      throw IoError("eff-stats csv: unknown block: " + block);
    }
  }
  for (auto& s : stats) {
    compute_estimator_fields(s);
  }
  return stats;
}

}  // namespace cfmimo
