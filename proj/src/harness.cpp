#include "cfmimo/harness.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "cfmimo/dl_estimation.hpp"
#include "cfmimo/errors.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

const char* sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kApAntennas: return "N";
    case SweepAxis::kUsers: return "K";
    case SweepAxis::kUserAntennas: return "M";
    case SweepAxis::kDlPower: return "rho_d";
  }
  return "N";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "N" || name == "ap_antennas") return SweepAxis::kApAntennas;
  if (name == "K" || name == "users") return SweepAxis::kUsers;
  if (name == "M" || name == "user_antennas") return SweepAxis::kUserAntennas;
  if (name == "rho_d" || name == "dl_power") return SweepAxis::kDlPower;
  throw ConfigError("unknown sweep axis: " + name);
}

std::vector<std::string> ExperimentPlan::validate() const {
  std::vector<std::string> violations;
  if (values.empty()) violations.push_back("plan.sweep_values must be nonempty");
  if (n_setups < 1) violations.push_back("plan.n_setups must be >= 1");
  if (n_realizations < 1) violations.push_back("plan.n_realizations must be >= 1");
  if (threads < 0) violations.push_back("plan.threads must be >= 0");
  for (const double v : values) {
    try {
      const SystemConfig cfg = apply_sweep_value(base, axis, v);
      for (auto& msg : cfg.validate()) {
        std::ostringstream os;
        os << "at " << sweep_axis_name(axis) << " = " << v << ": " << msg;
        violations.push_back(os.str());
      }
      if (compute_dl_bound && n_stat < 10 * cfg.user_antennas * cfg.user_antennas) {
        std::ostringstream os;
        os << "plan.n_stat must be >= " << 10 * cfg.user_antennas * cfg.user_antennas
           << " for user_antennas = " << cfg.user_antennas;
        violations.push_back(os.str());
      }
    } catch (const SimError& e) {
      violations.push_back(e.what());
    }
  }
  return violations;
}

void ExperimentPlan::require_valid() const {
  const auto violations = validate();
  if (violations.empty()) return;
  std::ostringstream os;
  os << "invalid experiment plan:";
  for (const auto& v : violations) os << "\n  - " << v;
  throw ConfigError(os.str());
}

SystemConfig apply_sweep_value(const SystemConfig& base, SweepAxis axis,
                               double value) {
  SystemConfig cfg = base;
  switch (axis) {
    case SweepAxis::kApAntennas:
      cfg.ap_antennas = static_cast<int>(std::lround(value));
      break;
    case SweepAxis::kUsers: {
      const int k = static_cast<int>(std::lround(value));
      const int ratio = std::max(1, base.num_users / std::max(1, base.num_pilot_matrices));
      if (k % ratio != 0) {
        std::ostringstream os;
        os << "cannot sweep K to " << k << ": pilot-sharing group size " << ratio
           << " does not divide it";
        throw ConfigError(os.str());
      }
      cfg.num_users = k;
      cfg.num_pilot_matrices = k / ratio;
      cfg.pilot_len = cfg.num_pilot_matrices * cfg.user_antennas;
      break;
    }
    case SweepAxis::kUserAntennas:
      cfg.user_antennas = static_cast<int>(std::lround(value));
      cfg.pilot_len = cfg.num_pilot_matrices * cfg.user_antennas;
      break;
    case SweepAxis::kDlPower:
      cfg.dl_power = value;
      break;
  }
  return cfg;
}

PointResult run_point(const SystemConfig& config, const PointSettings& settings,
                      std::uint64_t master_seed, int setup_index) {
  config.require_valid();
  const auto setup = static_cast<std::uint64_t>(setup_index);
  const int num_users = config.num_users;
  const auto m = static_cast<arma::uword>(config.user_antennas);

  const Geometry geometry =
      generate_geometry(config, derive_seed(master_seed, {stream::kGeometry, setup}));
  const PilotBook pilots =
      build_pilot_book(config, derive_seed(master_seed, {stream::kPilotAssignment, setup}));

  std::vector<EffChanStats> stats;
  if (settings.compute_dl_bound) {
    stats = calibrate_eff_stats(config, geometry, pilots, settings.n_stat,
                                derive_seed(master_seed, {stream::kCalibration, setup}));
  }

  const std::uint64_t eval_base = derive_seed(master_seed, {stream::kEvaluation, setup});
  const MmsePipeline pipeline;

  std::vector<EffectiveChannelSet> ensemble;
  ensemble.reserve(static_cast<std::size_t>(settings.n_realizations));
  std::vector<arma::cx_mat> Q;
  std::vector<std::vector<arma::cx_mat>> combiners(static_cast<std::size_t>(num_users));
  std::vector<std::vector<arma::cx_mat>> estimates(static_cast<std::size_t>(num_users));
  std::vector<std::vector<std::size_t>> kept(static_cast<std::size_t>(num_users));
  std::size_t outage_trials = 0;
  std::uint64_t digest = 1469598103934665603ULL;

  for (int t = 0; t < settings.n_realizations; ++t) {
    const std::uint64_t trial_seed = derive_seed(eval_base, {static_cast<std::uint64_t>(t)});
    const auto channels =
        draw_channels(geometry, config, derive_seed(trial_seed, {stream::kChannel}));
    for (const auto& h : channels.H) digest = digest_matrix(h, digest);

    const auto prec = pipeline(channels, geometry, pilots, config, trial_seed);
    if (Q.empty()) Q = prec.Q;
    auto eff = effective_channels(channels, prec);

    if (settings.compute_dl_bound) {
      const auto obs = dl_pilot_phase(eff, pilots, prec.Q, config,
                                      derive_seed(trial_seed, {stream::kDownlinkNoise}));
      for (int k = 0; k < num_users; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const auto est = lmmse_estimate(arma::vectorise(obs.Y[ku]), stats[ku]);
        const auto comb = zf_combiner(est, config.options.combiner_cond_limit);
        if (comb.flagged) {
          ++outage_trials;
          continue;
        }
        combiners[ku].push_back(comb.U_H);
        estimates[ku].push_back(est.B_hat);
        kept[ku].push_back(static_cast<std::size_t>(t));
      }
    }
    ensemble.push_back(std::move(eff));
  }

  PointResult result;
  result.channel_digest = digest;
  result.outage_trials = outage_trials;
  result.has_dl = settings.compute_dl_bound;

  const double prelog_csi = 1.0 - static_cast<double>(config.pilot_len_or_default()) /
                                      config.coherence_len;
  const double prelog_dl = 1.0 - 2.0 * static_cast<double>(config.pilot_len_or_default()) /
                                     config.coherence_len;

  result.no_csi.kind = BoundKind::kNoCsi;
  result.no_csi.prelog = prelog_csi;
  result.no_csi.per_user_se.zeros(static_cast<arma::uword>(num_users));
  result.no_csi.per_user_stderr.zeros(static_cast<arma::uword>(num_users));
  result.perfect_csi.kind = BoundKind::kPerfectCsi;
  result.perfect_csi.prelog = prelog_csi;
  result.perfect_csi.per_user_se.zeros(static_cast<arma::uword>(num_users));
  result.perfect_csi.per_user_stderr.zeros(static_cast<arma::uword>(num_users));
  if (settings.compute_dl_bound) {
    result.dl_pilots.kind = BoundKind::kDlPilots;
    result.dl_pilots.prelog = prelog_dl;
    result.dl_pilots.per_user_se.zeros(static_cast<arma::uword>(num_users));
    result.dl_pilots.per_user_stderr.zeros(static_cast<arma::uword>(num_users));
  }

  for (int k = 0; k < num_users; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const arma::cx_mat b_bar = mean_effective_channel(ensemble, k);
    const arma::cx_mat xi = hardening_noise_cov(ensemble, k, Q, b_bar);
    result.no_csi.per_user_se(ku) = se_no_csi(b_bar, xi, Q[ku], config);

    double se_stderr = 0.0;
    result.perfect_csi.per_user_se(ku) =
        se_perfect_csi(ensemble, k, Q, config, &se_stderr);
    result.perfect_csi.per_user_stderr(ku) = se_stderr;

    if (settings.compute_dl_bound) {
      if (kept[ku].empty()) {
        result.dl_pilots.per_user_se(ku) = 0.0;  // every trial was an outage
        continue;
      }
      const arma::cx_mat c_nprime =
          zf_noise_cov(ensemble, combiners[ku], estimates[ku], kept[ku], k, Q);
      const double kept_fraction = static_cast<double>(kept[ku].size()) /
                                   settings.n_realizations;
      result.dl_pilots.per_user_se(ku) =
          kept_fraction * se_dl_pilots(c_nprime, Q[ku], config);
    }
  }
  result.no_csi.sum_se = arma::accu(result.no_csi.per_user_se);
  result.perfect_csi.sum_se = arma::accu(result.perfect_csi.per_user_se);
  if (settings.compute_dl_bound) {
    result.dl_pilots.sum_se = arma::accu(result.dl_pilots.per_user_se);
  }
  (void)m;
  return result;
}

namespace {

// Kahan-compensated accumulation; merged in fixed slot order so aggregates do
// not depend on worker scheduling.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

struct BoundAggregate {
  CompensatedSum per_user, per_user_sq, total, total_sq;
  int count = 0;
  void add(const SeResult& r, int num_users) {
    const double pu = r.sum_se / num_users;
    per_user.add(pu);
    per_user_sq.add(pu * pu);
    total.add(r.sum_se);
    total_sq.add(r.sum_se * r.sum_se);
    ++count;
  }
};

SweepRow make_row(const BoundAggregate& agg, BoundKind kind, SweepAxis axis,
                  double value, int n_realizations, std::size_t outages) {
  SweepRow row;
  row.axis = sweep_axis_name(axis);
  row.value = value;
  row.bound = kind;
  row.n_setups = agg.count;
  row.n_realizations = n_realizations;
  row.outages = outages;
  if (agg.count > 0) {
    const auto n = static_cast<double>(agg.count);
    row.per_user_se_mean = agg.per_user.sum / n;
    row.sum_se_mean = agg.total.sum / n;
    if (agg.count > 1) {
      const double var_pu = std::max(
          0.0, (agg.per_user_sq.sum - n * row.per_user_se_mean * row.per_user_se_mean) /
                   (n - 1.0));
      const double var_sum = std::max(
          0.0,
          (agg.total_sq.sum - n * row.sum_se_mean * row.sum_se_mean) / (n - 1.0));
      row.per_user_se_stderr = std::sqrt(var_pu / n);
      row.sum_se_stderr = std::sqrt(var_sum / n);
    }
  }
  return row;
}

}  // namespace

std::vector<SweepRow> aggregate_point_results(
    const std::vector<std::optional<PointResult>>& setups,
    const SystemConfig& config, SweepAxis axis, double value,
    int n_realizations, std::size_t* failed_out) {
  const auto total = setups.size();
  std::size_t failed = 0;
  BoundAggregate no_csi, perfect, dl;
  std::size_t outages = 0;
  bool has_dl = false;
  for (const auto& maybe : setups) {
    if (!maybe.has_value()) {
      ++failed;
      continue;
    }
    const PointResult& point = *maybe;
    no_csi.add(point.no_csi, config.num_users);
    perfect.add(point.perfect_csi, config.num_users);
    if (point.has_dl) {
      has_dl = true;
      dl.add(point.dl_pilots, config.num_users);
    }
    outages += point.outage_trials;
  }
  if (failed_out != nullptr) *failed_out = failed;
  if (failed * 10 > total) {
    std::ostringstream os;
    os << failed << " of " << total << " setups failed at "
       << sweep_axis_name(axis) << " = " << value
       << " (budget is 10%); aborting sweep";
    throw FailureBudgetError(os.str());
  }

  std::vector<SweepRow> rows;
  rows.push_back(make_row(no_csi, BoundKind::kNoCsi, axis, value, n_realizations, 0));
  rows.push_back(
      make_row(perfect, BoundKind::kPerfectCsi, axis, value, n_realizations, 0));
  if (has_dl) {
    rows.push_back(
        make_row(dl, BoundKind::kDlPilots, axis, value, n_realizations, outages));
  }
  return rows;
}

ExperimentResult run_sweep(const ExperimentPlan& plan, const RowCallback& on_row) {
  plan.require_valid();

  const auto n_values = plan.values.size();
  const auto setups_per_value = static_cast<std::size_t>(plan.n_setups);
  const std::size_t n_tasks = n_values * setups_per_value;

  std::vector<SystemConfig> configs;
  configs.reserve(n_values);
  for (const double v : plan.values) {
    configs.push_back(apply_sweep_value(plan.base, plan.axis, v));
  }

  PointSettings settings;
  settings.n_realizations = plan.n_realizations;
  settings.n_stat = plan.n_stat;
  settings.compute_dl_bound = plan.compute_dl_bound;

  // Every task writes only its own slot, so results are identical for any
  // worker count.
  std::vector<std::vector<std::optional<PointResult>>> slots(
      n_values, std::vector<std::optional<PointResult>>(setups_per_value));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t task = next.fetch_add(1);
      if (task >= n_tasks) break;
      const std::size_t vi = task / setups_per_value;
      const auto setup = static_cast<int>(task % setups_per_value);
      try {
        slots[vi][static_cast<std::size_t>(setup)] =
            run_point(configs[vi], settings, plan.master_seed, setup);
      } catch (const SimError&) {
        // excluded by the aggregation step; counted against the budget
      }
    }
  };

  int n_threads = plan.threads;
  if (n_threads <= 0) {
    n_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }
  if (n_threads <= 1 || n_tasks <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ExperimentResult result;
  result.plan = plan;
  for (std::size_t vi = 0; vi < n_values; ++vi) {
    std::size_t failed = 0;
    auto rows = aggregate_point_results(slots[vi], configs[vi], plan.axis,
                                        plan.values[vi], plan.n_realizations, &failed);
    result.failed_setups += failed;
    for (auto& row : rows) {
      if (on_row) on_row(row);
      result.rows.push_back(std::move(row));
    }
    if (plan.keep_setup_records) {
      std::vector<PointResult> records;
      records.reserve(setups_per_value);
      for (auto& maybe : slots[vi]) {
        if (maybe.has_value()) records.push_back(std::move(*maybe));
      }
      result.setup_records.push_back(std::move(records));
    }
  }
  return result;
}

}  // namespace cfmimo
