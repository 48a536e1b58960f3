#include "cfmimo/presets.hpp"

#include "cfmimo/errors.hpp"

namespace cfmimo {

namespace {

ExperimentPlan base_plan() {
  ExperimentPlan plan;
  plan.base = SystemConfig{};
  plan.n_setups = 50;
  plan.n_realizations = 500;
  plan.n_stat = 2000;
  plan.master_seed = 1;
  return plan;
}

}  // namespace

ExperimentPlan preset_plan(const std::string& name) {
  ExperimentPlan plan = base_plan();
  if (name == "fig1" || name == "fig2") {
    plan.base.num_aps = 10;
    plan.base.num_users = 5;
    plan.base.user_antennas = (name == "fig1") ? 1 : 2;
    plan.base.num_pilot_matrices = 5;  // orthogonal pilots, K' = K
    plan.base.pilot_len = 0;
    plan.axis = SweepAxis::kApAntennas;
    plan.values = {1, 2, 3, 4, 5, 6, 7, 8};
    return plan;
  }
  if (name == "fig3") {
    plan.base.num_aps = 20;
    plan.base.ap_antennas = 4;
    plan.base.num_users = 5;
    plan.base.user_antennas = 2;
    plan.base.num_pilot_matrices = 5;  // K' = K; the ratio persists over the sweep
    plan.base.pilot_len = 0;
    plan.axis = SweepAxis::kUsers;
    plan.values = {5, 10, 15};
    return plan;
  }
  throw ConfigError("unknown preset: " + name + " (expected fig1|fig2|fig3)");
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3"}; }

}  // namespace cfmimo
