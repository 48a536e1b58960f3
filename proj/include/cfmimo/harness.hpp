/**
 * @file harness.hpp
 * @brief Multi-geometry Monte Carlo experiments and parameter sweeps.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cfmimo/se_bounds.hpp"

namespace cfmimo {

enum class SweepAxis { kApAntennas, kUsers, kUserAntennas, kDlPower };

const char* sweep_axis_name(SweepAxis axis);  // "N", "K", "M", "rho_d"
SweepAxis sweep_axis_from_string(const std::string& name);

struct ExperimentPlan {
  SystemConfig base;
  SweepAxis axis = SweepAxis::kApAntennas;
  std::vector<double> values;
  int n_setups = 50;
  int n_realizations = 500;
  int n_stat = 2000;
  std::uint64_t master_seed = 1;
  bool compute_dl_bound = true;
  bool keep_setup_records = false;
  int threads = 1;  ///< worker threads; results are thread-count invariant

  std::vector<std::string> validate() const;
  void require_valid() const;
};

/// Returns the base config with the sweep value applied. Sweeping K keeps the
/// pilot-sharing ratio K/K' fixed; sweeping K or M rederives tau_p = K' M.
SystemConfig apply_sweep_value(const SystemConfig& base, SweepAxis axis,
                               double value);

struct PointSettings {
  int n_realizations = 500;
  int n_stat = 2000;
  bool compute_dl_bound = true;
};

/// All bounds for one geometry, evaluated on identical channel realizations.
struct PointResult {
  SeResult no_csi;
  SeResult perfect_csi;
  SeResult dl_pilots;  ///< empty per_user_se when the DL bound is disabled
  bool has_dl = false;
  std::size_t outage_trials = 0;
  std::uint64_t channel_digest = 0;  ///< digest of the evaluation channel stream
};

/// One geometry end to end: placement, pilot book, calibration pass (when the
/// DL bound is enabled), then a realization loop feeding all bounds.
PointResult run_point(const SystemConfig& config, const PointSettings& settings,
                      std::uint64_t master_seed, int setup_index);

struct SweepRow {
  std::string axis;
  double value = 0.0;
  BoundKind bound = BoundKind::kNoCsi;
  double per_user_se_mean = 0.0;
  double per_user_se_stderr = 0.0;
  double sum_se_mean = 0.0;
  double sum_se_stderr = 0.0;
  int n_setups = 0;
  int n_realizations = 0;
  std::size_t outages = 0;
};

struct ExperimentResult {
  std::vector<SweepRow> rows;
  ExperimentPlan plan;                       ///< provenance
  std::size_t failed_setups = 0;
  std::vector<std::vector<PointResult>> setup_records;  ///< [value][setup] if kept
};

using RowCallback = std::function<void(const SweepRow&)>;

/// Aggregates run_point over n_setups geometries per sweep value. Failed
/// geometries are logged and excluded; more than 10% failures at any sweep
/// value aborts with FailureBudgetError.
ExperimentResult run_sweep(const ExperimentPlan& plan,
                           const RowCallback& on_row = nullptr);

/// Aggregation step of run_sweep, exposed for the failure-policy contract:
/// throws FailureBudgetError when more than 10% of setups failed.
std::vector<SweepRow> aggregate_point_results(
    const std::vector<std::optional<PointResult>>& setups,
    const SystemConfig& config, SweepAxis axis, double value,
    int n_realizations, std::size_t* failed_out);

}  // namespace cfmimo
