#include "cfmimo/rng.hpp"

namespace cfmimo {

std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = splitmix64(master);
  for (const std::uint64_t w : words) {
    h = splitmix64(h ^ (w + kSeedGolden));
  }
  return h;
}

arma::cx_mat Rng::cgaussian_mat(arma::uword rows, arma::uword cols) {
  arma::cx_mat m(rows, cols);
  for (arma::uword c = 0; c < cols; ++c) {
    for (arma::uword r = 0; r < rows; ++r) {
      m(r, c) = cgaussian();
    }
  }
  return m;
}

arma::cx_vec Rng::cgaussian_vec(arma::uword n) {
  arma::cx_vec v(n);
  for (arma::uword i = 0; i < n; ++i) {
    v(i) = cgaussian();
  }
  return v;
}

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(gen_);
}

std::size_t Rng::index(std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(gen_);
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    p[static_cast<std::size_t>(i)] = i;
  }
  for (int i = n - 1; i > 0; --i) {
    const auto j = index(static_cast<std::size_t>(i) + 1);
    std::swap(p[static_cast<std::size_t>(i)], p[j]);
  }
  return p;
}

std::uint64_t fnv1a_bytes(const void* data, std::size_t len, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t digest_matrix(const arma::cx_mat& m, std::uint64_t h) {
  return fnv1a_bytes(m.memptr(), m.n_elem * sizeof(arma::cx_double), h);
}

}  // namespace cfmimo
