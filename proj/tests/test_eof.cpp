#include "entmix/quantum.hpp"
#include "entmix/random.hpp"
#include "wootters.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace entmix::quantum {
namespace {

using entmix::testing::wootters_eof;

TEST(Wootters, OracleSanity) {
  const VectorXcd bell = PureBipartiteState::maximally_entangled(2).amplitudes();
  EXPECT_NEAR(wootters_eof(bell * bell.adjoint()), 1.0, 1e-12);
  EXPECT_NEAR(wootters_eof(Eigen::Matrix4cd::Identity() / 4.0), 0.0, 1e-12);
  // Werner mixture with singlet weight 1/2 has concurrence (3w-1)/2.
  const Eigen::Matrix4cd werner = 0.5 * bell * bell.adjoint() + 0.5 * Eigen::Matrix4cd::Identity() / 4.0;
  EXPECT_NEAR(testing::wootters_concurrence(werner), 0.25, 1e-12);
}

TEST(Eof, PureStatesMatchEntanglementEntropy) {
  CounterRng rng(21);
  for (int t = 0; t < 5; ++t) {
    const auto psi = random_pure_state(rng, 2, 2);
    const DensityMatrix rho(psi.amplitudes() * psi.amplitudes().adjoint());
    const double e = entanglement_entropy(psi.amplitudes(), 2, 2);
    EXPECT_NEAR(entanglement_of_formation(rho).value, e, 1e-9);
  }
}

TEST(Eof, BellAndProduct) {
  const VectorXcd b = PureBipartiteState::maximally_entangled(2).amplitudes();
  EXPECT_NEAR(entanglement_of_formation(DensityMatrix(b * b.adjoint())).value, 1.0, 1e-6);
  const auto prod = PureBipartiteState::product(VectorXcd::Unit(2, 0), VectorXcd::Unit(2, 1));
  EXPECT_NEAR(entanglement_of_formation(DensityMatrix(prod.amplitudes() * prod.amplitudes().adjoint())).value, 0.0,
              1e-9);
  EXPECT_NEAR(entanglement_of_formation(DensityMatrix::maximally_mixed(4)).value, 0.0, 1e-6);
}

TEST(Eof, DecompositionReproducesState) {
  CounterRng rng(22);
  const DensityMatrix rho(random_density(rng, 4, 3));
  const auto r = entanglement_of_formation(rho);
  MatrixXcd sum = MatrixXcd::Zero(4, 4);
  double avg = 0.0;
  for (int k = 0; k < r.ensemble_size; ++k) {
    sum += r.probabilities[k] * r.members[k] * r.members[k].adjoint();
    avg += r.probabilities[k] * entanglement_entropy(r.members[k], 2, 2);
  }
  EXPECT_LE((sum - rho.matrix()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(avg, r.value, 1e-9);
}

TEST(Eof, RandomTwoQubitStatesAgreeWithWootters) {
  CounterRng rng(23);
  for (int t = 0; t < 25; ++t) {
    const DensityMatrix rho(random_density(rng, 4, 1 + t % 4));
    const double oracle = wootters_eof(rho.matrix());
    const double value = entanglement_of_formation(rho).value;
    EXPECT_NEAR(value, oracle, 1e-3) << "trial " << t;
  }
}

TEST(Eof, WernerFamily) {
  const VectorXcd b = PureBipartiteState::maximally_entangled(2).amplitudes();
  for (double w : {0.2, 0.5, 0.8}) {
    const DensityMatrix rho(w * b * b.adjoint() + (1 - w) * MatrixXcd::Identity(4, 4) / 4.0);
    EXPECT_NEAR(entanglement_of_formation(rho).value, wootters_eof(rho.matrix()), 1e-3) << w;
  }
}

TEST(Eof, RejectsLargerSystems) {
  EXPECT_THROW(entanglement_of_formation(DensityMatrix::maximally_mixed(3)), UnsupportedError);
}

}  // namespace
}  // namespace entmix::quantum
