/**
 * @file geometry.hpp
 * @brief Random AP/user placement and large-scale fading coefficients.
 */
#pragma once

#include <armadillo>
#include <cstdint>
#include <iosfwd>

#include "cfmimo/config.hpp"

namespace cfmimo {

struct Geometry {
  arma::mat ap_xy;    ///< L x 2, meters
  arma::mat user_xy;  ///< K x 2, meters
  arma::mat beta;     ///< L x K large-scale gains, linear
};

/// Path-loss gain (linear, no shadowing) at 3-D distance d3 meters.
double path_loss_linear(const PathLossParams& params, double d3_m);

/// 3-D distance between an AP and a user given their planar offsets,
/// including the height gap and the distance floor.
double link_distance(const PathLossParams& params, double dx_m, double dy_m);

/// Draws L AP and K user positions uniformly over the square area and fills
/// beta from the path-loss model with independent log-normal shadowing.
Geometry generate_geometry(const SystemConfig& config, std::uint64_t seed);

/// CSV with columns entity_type,index,x_m,y_m.
void write_geometry_csv(const Geometry& geometry, std::ostream& out);

}  // namespace cfmimo
