#include "cfmimo/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "cfmimo/errors.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

using nlohmann::json;

namespace {

template <typename T>
void read_into(const json& section, const char* key, T& target) {
  if (section.contains(key)) {
    section.at(key).get_to(target);
  }
}

}  // namespace

json plan_to_json(const ExperimentPlan& plan) {
  const SystemConfig& cfg = plan.base;
  json root;
  root["system"] = {
      {"num_aps", cfg.num_aps},
      {"ap_antennas", cfg.ap_antennas},
      {"num_users", cfg.num_users},
      {"user_antennas", cfg.user_antennas},
      {"pilot_len", cfg.pilot_len},
      {"coherence_len", cfg.coherence_len},
      {"num_pilot_matrices", cfg.num_pilot_matrices},
      {"ul_pilot_power", cfg.ul_pilot_power},
      {"dl_power", cfg.dl_power},
      {"area_side_m", cfg.area_side_m},
  };
  root["pathloss"] = {
      {"const_db", cfg.pathloss.const_db},
      {"exponent", cfg.pathloss.exponent},
      {"shadow_std_db", cfg.pathloss.shadow_std_db},
      {"height_m", cfg.pathloss.height_m},
      {"d_min_m", cfg.pathloss.d_min_m},
  };
  root["options"] = {
      {"normalization", to_string(cfg.options.normalization)},
      {"precoder_gram_scale", cfg.options.precoder_gram_scale},
      {"ridge_scale", cfg.options.ridge_scale},
      {"combiner_cond_limit", cfg.options.combiner_cond_limit},
  };
  root["plan"] = {
      {"sweep_axis", sweep_axis_name(plan.axis)},
      {"sweep_values", plan.values},
      {"n_setups", plan.n_setups},
      {"n_realizations", plan.n_realizations},
      {"n_stat", plan.n_stat},
      {"master_seed", plan.master_seed},
      {"compute_dl_bound", plan.compute_dl_bound},
  };
  return root;
}

ExperimentPlan plan_from_json(const json& root) {
  ExperimentPlan plan;
  SystemConfig& cfg = plan.base;
  try {
    if (root.contains("system")) {
      const json& s = root.at("system");
      read_into(s, "num_aps", cfg.num_aps);
      read_into(s, "ap_antennas", cfg.ap_antennas);
      read_into(s, "num_users", cfg.num_users);
      read_into(s, "user_antennas", cfg.user_antennas);
      read_into(s, "pilot_len", cfg.pilot_len);
      read_into(s, "coherence_len", cfg.coherence_len);
      read_into(s, "num_pilot_matrices", cfg.num_pilot_matrices);
      read_into(s, "ul_pilot_power", cfg.ul_pilot_power);
      read_into(s, "dl_power", cfg.dl_power);
      read_into(s, "area_side_m", cfg.area_side_m);
    }
    if (root.contains("pathloss")) {
      const json& p = root.at("pathloss");
      read_into(p, "const_db", cfg.pathloss.const_db);
      read_into(p, "exponent", cfg.pathloss.exponent);
      read_into(p, "shadow_std_db", cfg.pathloss.shadow_std_db);
      read_into(p, "height_m", cfg.pathloss.height_m);
      read_into(p, "d_min_m", cfg.pathloss.d_min_m);
    }
    if (root.contains("options")) {
      const json& o = root.at("options");
      if (o.contains("normalization")) {
        cfg.options.normalization =
            normalization_from_string(o.at("normalization").get<std::string>());
      }
      read_into(o, "precoder_gram_scale", cfg.options.precoder_gram_scale);
      read_into(o, "ridge_scale", cfg.options.ridge_scale);
      read_into(o, "combiner_cond_limit", cfg.options.combiner_cond_limit);
    }
    if (root.contains("plan")) {
      const json& p = root.at("plan");
      if (p.contains("sweep_axis")) {
        plan.axis = sweep_axis_from_string(p.at("sweep_axis").get<std::string>());
      }
      read_into(p, "sweep_values", plan.values);
      read_into(p, "n_setups", plan.n_setups);
      read_into(p, "n_realizations", plan.n_realizations);
      read_into(p, "n_stat", plan.n_stat);
      read_into(p, "master_seed", plan.master_seed);
      read_into(p, "compute_dl_bound", plan.compute_dl_bound);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  if (plan.values.empty()) {
    plan.values = {static_cast<double>(cfg.ap_antennas)};
  }
  return plan;
}

ExperimentPlan load_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config file " + path + ": " + e.what());
  }
  return plan_from_json(root);
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key=value: " + assignment);
  }
  std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  // Bare single-letter axes map onto the system section.
  if (key == "L") key = "num_aps";
  if (key == "N") key = "ap_antennas";
  if (key == "K") key = "num_users";
  if (key == "M") key = "user_antennas";
  if (key == "rho_d") key = "dl_power";

  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // treat as string (e.g. normalization policy)
  }

  const auto dot = key.find('.');
  if (dot != std::string::npos) {
    const std::string section = key.substr(0, dot);
    const std::string field = key.substr(dot + 1);
    if (!root.contains(section)) root[section] = json::object();
    root[section][field] = parsed;
    return;
  }
  for (const char* section : {"system", "plan", "pathloss", "options"}) {
    if (root.contains(section) && root[section].contains(key)) {
      root[section][key] = parsed;
      return;
    }
  }
  // Unknown bare key: try the system section by default.
  static const char* kSystemKeys[] = {
      "num_aps", "ap_antennas", "num_users", "user_antennas", "pilot_len",
      "coherence_len", "num_pilot_matrices", "ul_pilot_power", "dl_power",
      "area_side_m"};
  for (const char* sk : kSystemKeys) {
    if (key == sk) {
      root["system"][key] = parsed;
      return;
    }
  }
  static const char* kPlanKeys[] = {"sweep_axis", "sweep_values", "n_setups",
                                    "n_realizations", "n_stat", "master_seed",
                                    "compute_dl_bound"};
  for (const char* pk : kPlanKeys) {
    if (key == pk) {
      root["plan"][key] = parsed;
      return;
    }
  }
  throw ConfigError("unknown config key: " + key);
}

std::string format_double(double v) {
  char buf[64];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::stod(buf) == v) break;
  }
  return buf;
}

void write_results_csv(const ExperimentResult& result, std::ostream& out) {
  out << "sweep_axis,sweep_value,bound,per_user_se_mean,per_user_se_stderr,"
         "sum_se_mean,sum_se_stderr,n_setups,n_realizations,outages\n";
  for (const auto& row : result.rows) {
    out << row.axis << ',' << format_double(row.value) << ','
        << bound_name(row.bound) << ',' << format_double(row.per_user_se_mean)
        << ',' << format_double(row.per_user_se_stderr) << ','
        << format_double(row.sum_se_mean) << ','
        << format_double(row.sum_se_stderr) << ',' << row.n_setups << ','
        << row.n_realizations << ',' << row.outages << '\n';
  }
}

std::string run_id_for(const ExperimentPlan& plan) {
  const std::string body = plan_to_json(plan).dump();
  std::uint64_t h = fnv1a_bytes(body.data(), body.size());
  h = derive_seed(plan.master_seed, {h});
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json make_manifest(const ExperimentResult& result, const std::string& run_id,
                   double wall_seconds, int threads) {
  json manifest;
  manifest["run_id"] = run_id;
  manifest["artifact"] = "cfmimo 0.1.0";
  manifest["seed_scheme"] =
      "splitmix64 chain over (master_seed, purpose, setup, realization)";
  manifest["master_seed"] = result.plan.master_seed;
  manifest["threads"] = threads;
  manifest["wall_seconds"] = wall_seconds;
  manifest["failed_setups"] = result.failed_setups;
  manifest["config"] = plan_to_json(result.plan);
  manifest["outputs"] = json::array({"results.csv", "plot.gp"});
  return manifest;
}

void write_plot_files(const ExperimentResult& result, const std::string& run_id,
                      const std::string& out_dir) {
  std::vector<std::string> dat_files;
  for (const BoundKind kind :
       {BoundKind::kNoCsi, BoundKind::kPerfectCsi, BoundKind::kDlPilots}) {
    std::string rows;
    for (const auto& row : result.rows) {
      if (row.bound != kind) continue;
      rows += format_double(row.value) + " " + format_double(row.per_user_se_mean) +
              " " + format_double(row.per_user_se_stderr) + " " +
              format_double(row.sum_se_mean) + " " +
              format_double(row.sum_se_stderr) + "\n";
    }
    if (rows.empty()) continue;
    const std::string name = std::string("plot_") + bound_name(kind) + ".dat";
    std::ofstream dat(out_dir + "/" + name);
    if (!dat) throw IoError("cannot write " + out_dir + "/" + name);
    dat << "# run_id: " << run_id << "\n"
        << "# sweep_value per_user_se_mean per_user_se_stderr sum_se_mean sum_se_stderr\n"
        << rows;
    dat_files.push_back(name);
  }

  std::ofstream gp(out_dir + "/plot.gp");
  if (!gp) throw IoError("cannot write " + out_dir + "/plot.gp");
  gp << "# run_id: " << run_id << "\n"
     << "set xlabel '" << (result.rows.empty() ? "sweep" : result.rows.front().axis)
     << "'\n"
     << "set ylabel 'per-user SE [bit/s/Hz]'\n"
     << "set key bottom right\n"
     << "plot ";
  for (std::size_t i = 0; i < dat_files.size(); ++i) {
    if (i > 0) gp << ", ";
    gp << "'" << dat_files[i] << "' using 1:2:3 with yerrorlines title '"
       << dat_files[i] << "'";
  }
  gp << "\n";
}

}  // namespace cfmimo
