/**
 * @file presets.hpp
 * @brief Built-in experiment presets mirroring the reference scenarios.
 */
#pragma once

#include <string>
#include <vector>

#include "cfmimo/harness.hpp"

namespace cfmimo {

/// fig1: L=10, K=5, M=1, orthogonal pilots, N swept over 1..8.
/// fig2: same with M=2.
/// fig3: L=20, N=4, M=2, orthogonal pilots, K swept over {5,10,15}.
ExperimentPlan preset_plan(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace cfmimo
