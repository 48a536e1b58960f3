#include "cfmimo/geometry.hpp"

#include <cmath>
#include <ostream>

#include "cfmimo/rng.hpp"

namespace cfmimo {

double link_distance(const PathLossParams& params, double dx_m, double dy_m) {
  const double d3 = std::sqrt(dx_m * dx_m + dy_m * dy_m +
                              params.height_m * params.height_m);
  return std::max(d3, params.d_min_m);
}

double path_loss_linear(const PathLossParams& params, double d3_m) {
  const double db = params.const_db - params.exponent * std::log10(d3_m);
  return std::pow(10.0, db / 10.0);
}

Geometry generate_geometry(const SystemConfig& config, std::uint64_t seed) {
  const int num_aps = config.num_aps;
  const int num_users = config.num_users;
  Rng rng(seed);

  Geometry g;
  g.ap_xy.set_size(num_aps, 2);
  g.user_xy.set_size(num_users, 2);
  for (int l = 0; l < num_aps; ++l) {
    g.ap_xy(l, 0) = rng.uniform(0.0, config.area_side_m);
    g.ap_xy(l, 1) = rng.uniform(0.0, config.area_side_m);
  }
  for (int k = 0; k < num_users; ++k) {
    g.user_xy(k, 0) = rng.uniform(0.0, config.area_side_m);
    g.user_xy(k, 1) = rng.uniform(0.0, config.area_side_m);
  }

  g.beta.set_size(num_aps, num_users);
  for (int l = 0; l < num_aps; ++l) {
    for (int k = 0; k < num_users; ++k) {
      const double d = link_distance(config.pathloss,
                                     g.ap_xy(l, 0) - g.user_xy(k, 0),
                                     g.ap_xy(l, 1) - g.user_xy(k, 1));
      const double shadow_db = config.pathloss.shadow_std_db * rng.gaussian();
      const double db = config.pathloss.const_db -
                        config.pathloss.exponent * std::log10(d) + shadow_db;
      g.beta(l, k) = std::pow(10.0, db / 10.0);
    }
  }
  return g;
}

void write_geometry_csv(const Geometry& geometry, std::ostream& out) {
  out << "entity_type,index,x_m,y_m\n";
  for (arma::uword l = 0; l < geometry.ap_xy.n_rows; ++l) {
    out << "ap," << l << ',' << geometry.ap_xy(l, 0) << ','
        << geometry.ap_xy(l, 1) << '\n';
  }
  for (arma::uword k = 0; k < geometry.user_xy.n_rows; ++k) {
    out << "user," << k << ',' << geometry.user_xy(k, 0) << ','
        << geometry.user_xy(k, 1) << '\n';
  }
}

}  // namespace cfmimo
