#pragma once

#include "entmix/common.hpp"

#include <cstdint>
#include <vector>

namespace entmix {

/// Counter-based generator: draw k of stream `seed` is a fixed hash of
/// (seed, k), so sequences are identical on every platform and a stream can
/// be forked per trial without shared state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  /// Uniform in the open interval (0, 1).
  double uniform();
  double normal();
  int uniform_int(int n);

  /// Independent generator for sub-stream `index`.
  CounterRng fork(std::uint64_t index) const;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::vector<double> random_simplex_point(CounterRng& rng, int n);
Eigen::VectorXcd random_unit_vector(CounterRng& rng, int n);
Eigen::MatrixXcd random_unitary(CounterRng& rng, int n);
/// Density matrix of the given rank from a normalized Ginibre draw.
Eigen::MatrixXcd random_density(CounterRng& rng, int n, int rank);
std::vector<int> random_permutation(CounterRng& rng, int n);

}  // namespace entmix
