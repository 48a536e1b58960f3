#include "cfmimo/pilot_book.hpp"

#include <sstream>

#include "cfmimo/errors.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

std::vector<std::vector<int>> sharing_sets_from_assignment(
    const std::vector<int>& assignment, int num_matrices) {
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(num_matrices));
  for (std::size_t k = 0; k < assignment.size(); ++k) {
    groups[static_cast<std::size_t>(assignment[k])].push_back(static_cast<int>(k));
  }
  std::vector<std::vector<int>> sets(assignment.size());
  for (std::size_t k = 0; k < assignment.size(); ++k) {
    sets[k] = groups[static_cast<std::size_t>(assignment[k])];
  }
  return sets;
}

PilotBook build_pilot_book(const SystemConfig& config, std::uint64_t seed) {
  const int num_matrices = config.num_pilot_matrices;
  const int num_users = config.num_users;
  const int m = config.user_antennas;
  const int tau_p = config.pilot_len_or_default();

  if (num_matrices * m > tau_p) {
    std::ostringstream os;
    os << "cannot fit " << num_matrices << " mutually orthogonal " << tau_p
       << "x" << m << " pilot matrices: need pilot_len >= " << num_matrices * m;
    throw ConfigError(os.str());
  }
  if (num_users % num_matrices != 0) {
    throw ConfigError("num_users must be divisible by num_pilot_matrices");
  }

  PilotBook book;
  book.matrices.reserve(static_cast<std::size_t>(num_matrices));
  for (int i = 0; i < num_matrices; ++i) {
    arma::cx_mat phi(static_cast<arma::uword>(tau_p), static_cast<arma::uword>(m),
                     arma::fill::zeros);
    for (int c = 0; c < m; ++c) {
      phi(static_cast<arma::uword>(i * m + c), static_cast<arma::uword>(c)) = 1.0;
    }
    book.matrices.push_back(std::move(phi));
  }

  // Groups of K/K' users per matrix, chosen uniformly at random.
  Rng rng(seed);
  const std::vector<int> order = rng.permutation(num_users);
  const int group_size = num_users / num_matrices;
  book.assignment.assign(static_cast<std::size_t>(num_users), 0);
  for (int pos = 0; pos < num_users; ++pos) {
    book.assignment[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] =
        pos / group_size;
  }
  book.sharing_sets = sharing_sets_from_assignment(book.assignment, num_matrices);
  return book;
}

}  // namespace cfmimo
