/**
 * @file io.hpp
 * @brief Configuration files, result CSV, manifest and plot-data output.
 */
#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "cfmimo/harness.hpp"

namespace cfmimo {

nlohmann::json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const nlohmann::json& root);

/// Reads the structured configuration file (sections: system, pathloss,
/// options, plan). Missing keys fall back to defaults.
ExperimentPlan load_plan_file(const std::string& path);

/// Applies one `--set key=value` override onto the raw JSON tree. Dotted keys
/// address sections directly (plan.n_setups); bare keys are resolved against
/// the system, plan, pathloss and options sections in that order.
void apply_override(nlohmann::json& root, const std::string& assignment);

/// Shortest representation that round-trips a double exactly.
std::string format_double(double v);

/// Schema: sweep_axis,sweep_value,bound,per_user_se_mean,per_user_se_stderr,
/// sum_se_mean,sum_se_stderr,n_setups,n_realizations,outages
void write_results_csv(const ExperimentResult& result, std::ostream& out);

/// Deterministic run identifier from the plan content (not wall clock).
std::string run_id_for(const ExperimentPlan& plan);

nlohmann::json make_manifest(const ExperimentResult& result,
                             const std::string& run_id, double wall_seconds,
                             int threads);

/// plot_<bound>.dat files plus a gnuplot script referencing them.
void write_plot_files(const ExperimentResult& result, const std::string& run_id,
                      const std::string& out_dir);

}  // namespace cfmimo
