/**
 * @file cfmimo_main.cpp
 * @brief Command-line front end: run sweeps, validate configurations.
 */
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfmimo/dl_estimation.hpp"
#include "cfmimo/errors.hpp"
#include "cfmimo/io.hpp"
#include "cfmimo/presets.hpp"
#include "cfmimo/rng.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

struct RunArgs {
  std::string preset;
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir;
  int threads = 1;
  bool quiet = false;
  bool dump_geometry = false;
  bool export_stats = false;
};

std::string default_out_dir() {
  const char* env = std::getenv("CFMIMO_OUT_DIR");
  return env != nullptr ? env : "out";
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

cfmimo::ExperimentPlan resolve_plan(const RunArgs& args) {
  nlohmann::json root;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) {
      throw cfmimo::ConfigError("cannot open config file: " + args.config_path);
    }
    try {
      in >> root;
    } catch (const nlohmann::json::exception& e) {
      throw cfmimo::ConfigError("cannot parse config file " + args.config_path +
                                ": " + e.what());
    }
  } else {
    const std::string name = args.preset.empty() ? "fig1" : args.preset;
    root = cfmimo::plan_to_json(cfmimo::preset_plan(name));
  }
  for (const auto& assignment : args.overrides) {
    cfmimo::apply_override(root, assignment);
  }
  cfmimo::ExperimentPlan plan = cfmimo::plan_from_json(root);
  if (args.seed_given) plan.master_seed = args.seed;
  plan.threads = args.threads;
  return plan;
}

void dump_geometries(const cfmimo::ExperimentPlan& plan, const std::string& out_dir) {
  for (const double v : plan.values) {
    const auto cfg = cfmimo::apply_sweep_value(plan.base, plan.axis, v);
    const auto geometry = cfmimo::generate_geometry(
        cfg, cfmimo::derive_seed(plan.master_seed, {cfmimo::stream::kGeometry, 0}));
    const std::string name = out_dir + "/geometry_" +
                             cfmimo::sweep_axis_name(plan.axis) + "_" +
                             cfmimo::format_double(v) + ".csv";
    std::ofstream out(name);
    if (!out) throw cfmimo::IoError("cannot write " + name);
    cfmimo::write_geometry_csv(geometry, out);
  }
}

void export_stats(const cfmimo::ExperimentPlan& plan, const std::string& out_dir) {
  for (const double v : plan.values) {
    const auto cfg = cfmimo::apply_sweep_value(plan.base, plan.axis, v);
    const auto geometry = cfmimo::generate_geometry(
        cfg, cfmimo::derive_seed(plan.master_seed, {cfmimo::stream::kGeometry, 0}));
    const auto pilots = cfmimo::build_pilot_book(
        cfg, cfmimo::derive_seed(plan.master_seed, {cfmimo::stream::kPilotAssignment, 0}));
    const auto stats = cfmimo::calibrate_eff_stats(
        cfg, geometry, pilots, plan.n_stat,
        cfmimo::derive_seed(plan.master_seed, {cfmimo::stream::kCalibration, 0}));
    const std::string name = out_dir + "/stats_" +
                             cfmimo::sweep_axis_name(plan.axis) + "_" +
                             cfmimo::format_double(v) + "_setup0.csv";
    std::ofstream out(name);
    if (!out) throw cfmimo::IoError("cannot write " + name);
    cfmimo::save_eff_stats_csv(stats, out);
  }
}

int cmd_run(const RunArgs& args) {
  const cfmimo::ExperimentPlan plan = resolve_plan(args);
  plan.require_valid();

  std::error_code ec;
  std::filesystem::create_directories(args.out_dir, ec);
  if (ec) {
    throw cfmimo::IoError("cannot create output directory " + args.out_dir + ": " +
                          ec.message());
  }

  const std::string run_id = cfmimo::run_id_for(plan);
  if (!args.quiet) {
    std::cout << "run " << run_id << ": " << plan.values.size()
              << " sweep values x " << plan.n_setups << " setups, seed "
              << plan.master_seed << "\n";
  }

  const auto started = std::chrono::steady_clock::now();
  cfmimo::RowCallback on_row;
  if (!args.quiet) {
    on_row = [](const cfmimo::SweepRow& row) {
      std::cout << "  " << row.axis << "=" << cfmimo::format_double(row.value)
                << " " << cfmimo::bound_name(row.bound)
                << " per-user SE " << row.per_user_se_mean << " +/- "
                << row.per_user_se_stderr << "\n";
    };
  }
  const cfmimo::ExperimentResult result = cfmimo::run_sweep(plan, on_row);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  {
    std::ofstream csv(args.out_dir + "/results.csv");
    if (!csv) throw cfmimo::IoError("cannot write " + args.out_dir + "/results.csv");
    cfmimo::write_results_csv(result, csv);
  }
  {
    nlohmann::json manifest = cfmimo::make_manifest(result, run_id, wall, args.threads);
    manifest["created"] = iso_timestamp();
    std::ofstream mf(args.out_dir + "/manifest.json");
    if (!mf) throw cfmimo::IoError("cannot write " + args.out_dir + "/manifest.json");
    mf << manifest.dump(2) << "\n";
  }
  cfmimo::write_plot_files(result, run_id, args.out_dir);
  if (args.dump_geometry) dump_geometries(plan, args.out_dir);
  if (args.export_stats) export_stats(plan, args.out_dir);

  if (!args.quiet) {
    std::cout << "wrote " << args.out_dir << "/results.csv ("
              << result.rows.size() << " rows, " << wall << " s)\n";
  }
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  cfmimo::ExperimentPlan plan;
  try {
    plan = cfmimo::load_plan_file(path);
  } catch (const cfmimo::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }
  const auto violations = plan.validate();
  if (violations.empty()) {
    std::cout << "ok\n";
    return kExitOk;
  }
  for (const auto& v : violations) {
    std::cout << "violation: " << v << "\n";
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  // Outer-loop threading only; keep the BLAS single-threaded and reproducible.
  setenv("OPENBLAS_NUM_THREADS", "1", 0);
  setenv("OMP_NUM_THREADS", "1", 0);

  CLI::App app{"cell-free massive MIMO downlink SE simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  run_args.out_dir = default_out_dir();
  CLI::App* run = app.add_subcommand("run", "run a preset or configured sweep");
  run->add_option("--preset", run_args.preset, "fig1|fig2|fig3")
      ->check(CLI::IsMember(cfmimo::preset_names()));
  run->add_option("--config", run_args.config_path, "configuration file (JSON)");
  run->add_option("--set", run_args.overrides,
                  "override config entries, e.g. --set M=2 --set plan.n_setups=10");
  auto* seed_opt = run->add_option("--seed", run_args.seed, "master seed");
  run->add_option("--out", run_args.out_dir,
                  "output directory (default $CFMIMO_OUT_DIR or ./out)");
  run->add_option("--threads", run_args.threads,
                  "worker threads (0 = hardware concurrency)");
  run->add_flag("--quiet", run_args.quiet, "suppress progress output");
  run->add_flag("--dump-geometry", run_args.dump_geometry,
                "export setup-0 geometry per sweep value as CSV");
  run->add_flag("--export-stats", run_args.export_stats,
                "export setup-0 calibrated effective-channel statistics");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "check a configuration file");
  validate->add_option("config", validate_path, "configuration file (JSON)")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) {
      run_args.seed_given = seed_opt->count() > 0;
      return cmd_run(run_args);
    }
    return cmd_validate(validate_path);
  } catch (const cfmimo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cfmimo::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const cfmimo::FailureBudgetError& e) {
    std::cerr << "numerical failure budget exceeded: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const cfmimo::SimError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
