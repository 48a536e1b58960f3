#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cfmimo/errors.hpp"
#include "cfmimo/io.hpp"
#include "cfmimo/presets.hpp"
#include "test_util.hpp"

using namespace cfmimo;
namespace fs = std::filesystem;

namespace {

/// The CLI lands next to the test binaries in bin/.
std::string cli_path() {
  if (const char* env = std::getenv("CFMIMO_CLI")) return env;
  return (fs::read_symlink("/proc/self/exe").parent_path() / "cfmimo").string();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("results csv: pinned header and row format") {
  ExperimentResult result;
  SweepRow row;
  row.axis = "N";
  row.value = 4;
  row.bound = BoundKind::kPerfectCsi;
  row.per_user_se_mean = 1.25;
  row.per_user_se_stderr = 0.03;
  row.sum_se_mean = 6.25;
  row.sum_se_stderr = 0.15;
  row.n_setups = 50;
  row.n_realizations = 500;
  row.outages = 0;
  result.rows.push_back(row);

  std::ostringstream out;
  write_results_csv(result, out);
  const std::string text = out.str();
  CHECK(text.rfind("sweep_axis,sweep_value,bound,per_user_se_mean,per_user_se_stderr,"
                   "sum_se_mean,sum_se_stderr,n_setups,n_realizations,outages\n",
                   0) == 0);
  CHECK(text.find("N,4,perfect_csi,1.25,0.03,6.25,0.15,50,500,0\n") != std::string::npos);
}

TEST_CASE("format_double round-trips exactly") {
  for (const double v : {0.0, 1.0, 1.0 / 3.0, 2.5119e12, 1e-17, -3.25}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("plan json round-trip preserves every field") {
  ExperimentPlan plan = preset_plan("fig3");
  plan.base.options.normalization = NormalizationPolicy::kPerApScalar;
  plan.base.options.precoder_gram_scale = 3.5;
  plan.master_seed = 99;
  const auto j = plan_to_json(plan);
  const ExperimentPlan back = plan_from_json(j);
  CHECK(back.base.num_aps == plan.base.num_aps);
  CHECK(back.base.user_antennas == plan.base.user_antennas);
  CHECK(back.base.options.normalization == NormalizationPolicy::kPerApScalar);
  CHECK(back.base.options.precoder_gram_scale == 3.5);
  CHECK(back.axis == plan.axis);
  CHECK(back.values == plan.values);
  CHECK(back.master_seed == 99);
}

TEST_CASE("overrides: fig1 with M=2 equals the fig2 preset") {
  auto root = plan_to_json(preset_plan("fig1"));
  apply_override(root, "M=2");
  const ExperimentPlan got = plan_from_json(root);
  const ExperimentPlan fig2 = preset_plan("fig2");
  CHECK(got.base.user_antennas == fig2.base.user_antennas);
  CHECK(got.base.num_aps == fig2.base.num_aps);
  CHECK(got.base.num_users == fig2.base.num_users);
  CHECK(got.values == fig2.values);
  CHECK(plan_to_json(got) == plan_to_json(fig2));
}

TEST_CASE("overrides: dotted paths, plan keys and rejection of unknowns") {
  auto root = plan_to_json(preset_plan("fig1"));
  apply_override(root, "plan.n_setups=7");
  apply_override(root, "n_realizations=33");
  apply_override(root, "options.normalization=per-ap-scalar");
  apply_override(root, "sweep_values=[2,4]");
  const ExperimentPlan got = plan_from_json(root);
  CHECK(got.n_setups == 7);
  CHECK(got.n_realizations == 33);
  CHECK(got.base.options.normalization == NormalizationPolicy::kPerApScalar);
  CHECK(got.values == std::vector<double>{2, 4});

  CHECK_THROWS_AS(apply_override(root, "no_such_key=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(root, "bogus"), ConfigError);
}

TEST_CASE("plan file loading: missing file names the path") {
  try {
    load_plan_file("/nonexistent/cfmimo.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/cfmimo.json") != std::string::npos);
  }
}

TEST_CASE("cli validate: accepts good configs, lists violations, exit codes") {
  const fs::path dir = fresh_dir("cfmimo_cli_validate");
  const fs::path good = dir / "good.json";
  {
    std::ofstream out(good);
    out << plan_to_json(preset_plan("fig1")).dump(2);
  }
  CHECK(run_cli("validate " + good.string()) == 0);

  const fs::path bad = dir / "bad.json";
  {
    auto root = plan_to_json(preset_plan("fig1"));
    root["system"]["pilot_len"] = 7;          // != K'M
    root["system"]["coherence_len"] = 10;     // 2 tau_p >= tau_c
    std::ofstream out(bad);
    out << root.dump(2);
  }
  CHECK(run_cli("validate " + bad.string()) == 2);
  CHECK(run_cli("validate /nonexistent/nope.json") == 2);
}

TEST_CASE("cli run: preset with overrides writes the documented outputs") {
  const fs::path dir = fresh_dir("cfmimo_cli_run");
  const int code = run_cli(
      "run --preset fig3 --seed 42 --quiet --threads 1"
      " --set plan.n_setups=1 --set plan.n_realizations=6 --set plan.n_stat=45"
      " --out " + dir.string());
  REQUIRE(code == 0);

  const std::string csv = slurp(dir / "results.csv");
  CHECK(csv.rfind("sweep_axis,sweep_value,bound,per_user_se_mean,per_user_se_stderr,"
                  "sum_se_mean,sum_se_stderr,n_setups,n_realizations,outages\n",
                  0) == 0);
  // 3 sweep values x 3 bounds plus the header.
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
  CHECK(csv.find("K,5,no_csi,") != std::string::npos);
  CHECK(csv.find("K,15,dl_pilots,") != std::string::npos);

  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "plot.gp"));
  CHECK(fs::exists(dir / "plot_dl_pilots.dat"));
  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("run_id") != std::string::npos);
  CHECK(manifest.find("master_seed") != std::string::npos);
}

TEST_CASE("cli run: missing config file exits 2 and names the path") {
  const fs::path dir = fresh_dir("cfmimo_cli_missing");
  const std::string cmd = cli_path() + " run --config /nonexistent/sim.json --out " +
                          dir.string() + " 2>" + (dir / "err.txt").string() +
                          " >/dev/null";
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
  CHECK(slurp(dir / "err.txt").find("/nonexistent/sim.json") != std::string::npos);
}

TEST_CASE("cli run: geometry and stats exports appear on request") {
  const fs::path dir = fresh_dir("cfmimo_cli_dumps");
  const int code = run_cli(
      "run --preset fig1 --quiet --threads 1 --dump-geometry --export-stats"
      " --set plan.n_setups=1 --set plan.n_realizations=4 --set plan.n_stat=12"
      " --set sweep_values=[2] --out " + dir.string());
  REQUIRE(code == 0);
  CHECK(fs::exists(dir / "geometry_N_2.csv"));
  CHECK(fs::exists(dir / "stats_N_2_setup0.csv"));
  const std::string geo = slurp(dir / "geometry_N_2.csv");
  CHECK(geo.rfind("entity_type,index,x_m,y_m\n", 0) == 0);
}
