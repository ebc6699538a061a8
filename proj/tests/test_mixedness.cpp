#include "entmix/mixedness.hpp"
#include "entmix/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace entmix {
namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

GptState square_state(double x, double y) { return GptState(make_square_bit(), Eigen::Vector3d(x, y, 1.0)); }

TEST(FeasibleCombination, Examples) {
  const std::vector<Eigen::VectorXd> gens{vec({1, 0}), vec({0, 1})};
  const auto mid = feasible_convex_combination(gens, vec({0.5, 0.5}));
  ASSERT_TRUE(mid.feasible);
  EXPECT_NEAR(mid.weights(0), 0.5, 1e-12);
  EXPECT_NEAR(mid.weights(1), 0.5, 1e-12);
  EXPECT_LE(mid.residual, 1e-8);
  EXPECT_FALSE(feasible_convex_combination(gens, vec({0.7, 0.5})).feasible);

  const auto rho = square_state(0.5, 0.2);
  std::vector<Eigen::VectorXd> orbit;
  for (const auto& g : rho.system()->group) orbit.push_back(g * rho.vec());
  EXPECT_TRUE(feasible_convex_combination(orbit, Eigen::Vector3d(0, 0, 1)).feasible);
}

TEST(FeasibleCombination, IllConditionedInputIsDiagnosed) {
  const std::vector<Eigen::VectorXd> gens{vec({1e14, 0}), vec({0, 1e-3})};
  EXPECT_THROW(feasible_convex_combination(gens, vec({1, 1})), NumericalError);
  const std::vector<Eigen::VectorXd> nan{vec({std::nan(""), 0})};
  EXPECT_THROW(feasible_convex_combination(nan, vec({1, 1})), NumericalError);
}

TEST(MoreMixed, ClassicalBit) {
  const auto bit = make_classical(2);
  const auto cert = more_mixed(GptState(bit, vec({0.7, 0.3})), GptState(bit, vec({0.5, 0.5})));
  ASSERT_TRUE(cert.feasible);
  EXPECT_NEAR(cert.weights(0), 0.5, 1e-12);
  EXPECT_NEAR(cert.weights(1), 0.5, 1e-12);
  EXPECT_FALSE(more_mixed(GptState(bit, vec({0.5, 0.5})), GptState(bit, vec({0.7, 0.3}))).feasible);
}

TEST(MoreMixed, SquareVertexDominatesEverything) {
  const auto sq = make_square_bit();
  CounterRng rng(3);
  for (const auto& v : sq->pure_states) {
    for (int t = 0; t < 25; ++t) {
      const auto w = random_simplex_point(rng, 4);
      Eigen::Vector3d s = Eigen::Vector3d::Zero();
      for (int i = 0; i < 4; ++i) s += w[i] * sq->pure_states[i];
      const auto cert = more_mixed(GptState(sq, v), GptState(sq, s));
      EXPECT_TRUE(cert.feasible);
      EXPECT_LE(cert.residual, 1e-8);
    }
  }
}

TEST(MoreMixed, RejectsUnnormalizedOrForeignStates) {
  const auto bit = make_classical(2);
  EXPECT_THROW(more_mixed(GptState(bit, vec({0.7, 0.2})), GptState(bit, vec({0.5, 0.5}))), PreconditionError);
  EXPECT_ANY_THROW(more_mixed(GptState(bit, vec({0.7, 0.3})), square_state(0, 0)));
}

TEST(MoreMixed, PreorderProperties) {
  const auto sys = make_classical(4);
  CounterRng rng(11);
  auto random_state = [&] {
    const auto w = random_simplex_point(rng, 4);
    return GptState(sys, Eigen::Map<const Eigen::VectorXd>(w.data(), 4));
  };
  auto degrade = [&](const GptState& s) {
    const auto w = random_simplex_point(rng, 2);
    Eigen::VectorXd out = w[0] * (sys->group[rng.uniform_int(24)] * s.vec()) + w[1] * (sys->group[rng.uniform_int(24)] * s.vec());
    return GptState(sys, out);
  };
  for (int t = 0; t < 50; ++t) {
    const auto rho = random_state();
    EXPECT_TRUE(more_mixed(rho, rho).feasible);
    const auto sigma = degrade(rho);
    const auto tau = degrade(sigma);
    ASSERT_TRUE(more_mixed(rho, sigma).feasible);
    ASSERT_TRUE(more_mixed(sigma, tau).feasible);
    EXPECT_TRUE(more_mixed(rho, tau).feasible);
    // Applying one group element to both sides keeps the verdict.
    const int g = rng.uniform_int(24);
    const auto other = random_state();
    EXPECT_EQ(more_mixed(rho, other).feasible,
              more_mixed(apply_group_element(g, rho), apply_group_element(g, other)).feasible);
  }
}

TEST(EquallyMixed, Examples) {
  const auto sq = make_square_bit();
  const auto eq = equally_mixed(square_state(0.5, 0.2), square_state(-0.5, 0.2));
  ASSERT_TRUE(eq.equal);
  ASSERT_TRUE(eq.witness.has_value());
  Eigen::Matrix3d reflect = Eigen::Matrix3d::Identity();
  reflect(0, 0) = -1;
  EXPECT_TRUE(sq->group[*eq.witness].isApprox(reflect));

  const auto bit = make_classical(2);
  const auto swap = equally_mixed(GptState(bit, vec({0.7, 0.3})), GptState(bit, vec({0.3, 0.7})));
  ASSERT_TRUE(swap.equal);
  EXPECT_EQ(*swap.witness, 1);
  EXPECT_FALSE(equally_mixed(GptState(bit, vec({0.7, 0.3})), GptState(bit, vec({0.6, 0.4}))).equal);
}

TEST(InvariantState, BuiltIns) {
  EXPECT_TRUE(invariant_state(make_square_bit()).vec().isApprox(Eigen::Vector3d(0, 0, 1), 1e-12));
  for (int n = 1; n <= 5; ++n)
    EXPECT_NEAR((invariant_state(make_classical(n)).vec() - Eigen::VectorXd::Constant(n, 1.0 / n)).cwiseAbs().maxCoeff(),
                0.0, 1e-12);
  const auto bit = make_classical(2);
  EXPECT_TRUE(more_mixed(GptState(bit, vec({1, 0})), invariant_state(bit)).feasible);
}

TEST(InvariantState, SeedDependenceIsRejected) {
  // A trivial group on a square gives different averages for different vertices.
  auto sys = std::make_shared<TheorySystem>(*make_square_bit());
  sys->group = {Eigen::Matrix3d::Identity()};
  EXPECT_THROW(invariant_state(sys), UnsupportedError);
}

TEST(OrbitHull, Examples) {
  const auto octagon = orbit_hull(square_state(0.5, 0.2));
  EXPECT_EQ(octagon.size(), 8u);
  EXPECT_EQ(orbit_hull(square_state(0, 0)).size(), 1u);
  const auto trit = make_classical(3);
  EXPECT_EQ(orbit_hull(GptState(trit, vec({1, 0, 0}))).size(), 3u);
  // A point on a symmetry axis has a smaller orbit.
  EXPECT_EQ(orbit_hull(square_state(0.5, 0.0)).size(), 4u);
}

TEST(OrbitHull, AgreesWithMoreMixedOnSamples) {
  const auto rho = square_state(0.5, 0.2);
  const auto hull = orbit_hull(rho);
  CounterRng rng(5);
  for (int t = 0; t < 200; ++t) {
    const Eigen::Vector3d s(2 * rng.uniform() - 1, 2 * rng.uniform() - 1, 1.0);
    const bool in_hull = feasible_convex_combination(hull, s).feasible;
    EXPECT_EQ(in_hull, more_mixed(rho, GptState(rho.system(), s)).feasible);
  }
}

TEST(Majorizes, Examples) {
  EXPECT_TRUE(majorizes(vec({0.7, 0.3}), vec({0.6, 0.4})));
  EXPECT_TRUE(majorizes(vec({0.5, 0.3, 0.2}), vec({0.5, 0.3, 0.2})));
  EXPECT_FALSE(majorizes(vec({0.5, 0.5}), vec({0.7, 0.3})));
  EXPECT_FALSE(majorizes(vec({0.5, 0.26, 0.24}), vec({0.48, 0.48, 0.04})));
  EXPECT_FALSE(majorizes(vec({0.48, 0.48, 0.04}), vec({0.5, 0.26, 0.24})));
  EXPECT_TRUE(majorizes(vec({0.3, 0.7}), vec({0.4, 0.6})));
  EXPECT_THROW(majorizes(vec({0.7, 0.2}), vec({0.5, 0.5})), PreconditionError);
  EXPECT_THROW(majorizes(vec({0.7, 0.3}), vec({0.5, 0.3, 0.2})), StructuralError);
}

TEST(Birkhoff, TwoLevelExample) {
  const auto ch = birkhoff_rare_synthesis(vec({0.7, 0.3}), vec({0.6, 0.4}));
  ASSERT_EQ(ch.entries().size(), 2u);
  EXPECT_EQ(ch.entries()[0].group_index, 0);
  EXPECT_NEAR(ch.entries()[0].weight, 0.75, 1e-12);
  EXPECT_EQ(ch.entries()[1].group_index, 1);
  EXPECT_NEAR(ch.entries()[1].weight, 0.25, 1e-12);
}

TEST(Birkhoff, PureToUniformSatisfiesDefiningEquation) {
  const Eigen::VectorXd p = vec({1, 0, 0});
  const Eigen::VectorXd q = Eigen::VectorXd::Constant(3, 1.0 / 3);
  const auto ch = birkhoff_rare_synthesis(p, q);
  EXPECT_LE((ch.apply(p) - q).cwiseAbs().maxCoeff(), 1e-9);
  double total = 0.0;
  for (const auto& e : ch.entries()) total += e.weight;
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Birkhoff, IdentityForEqualVectors) {
  const auto ch = birkhoff_rare_synthesis(vec({0.5, 0.3, 0.2}), vec({0.5, 0.3, 0.2}));
  ASSERT_EQ(ch.entries().size(), 1u);
  EXPECT_EQ(ch.entries()[0].group_index, 0);
  EXPECT_DOUBLE_EQ(ch.entries()[0].weight, 1.0);
}

TEST(Birkhoff, PreconditionAndCapacity) {
  EXPECT_THROW(birkhoff_rare_synthesis(vec({0.5, 0.5}), vec({0.7, 0.3})), PreconditionError);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(7);
  p(0) = 1.0;
  EXPECT_THROW(birkhoff_rare_synthesis(p, Eigen::VectorXd::Constant(7, 1.0 / 7)), CapacityError);
}

TEST(Birkhoff, RandomPairsRespectSupportBound) {
  CounterRng rng(21);
  for (int n = 2; n <= 6; ++n) {
    for (int t = 0; t < 40; ++t) {
      const auto pw = random_simplex_point(rng, n);
      const Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(pw.data(), n);
      // q = D p for a random doubly stochastic D (a mixture of permutations).
      Eigen::VectorXd q = Eigen::VectorXd::Zero(n);
      const auto w = random_simplex_point(rng, 3);
      for (int k = 0; k < 3; ++k) {
        const auto perm = random_permutation(rng, n);
        for (int i = 0; i < n; ++i) q(i) += w[k] * p(perm[i]);
      }
      const auto d = t_transform_matrix(p, q);
      EXPECT_LE((d * p - q).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_LE((d.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10);
      EXPECT_LE((d.colwise().sum().array() - 1.0).abs().maxCoeff(), 1e-10);
      EXPECT_GE(d.minCoeff(), -1e-12);

      const auto ch = birkhoff_rare_synthesis(p, q);
      EXPECT_LE((ch.apply(p) - q).cwiseAbs().maxCoeff(), 1e-9);
      EXPECT_LE(static_cast<int>(ch.entries().size()), (n - 1) * (n - 1) + 1);
    }
  }
}

TEST(Birkhoff, DecompositionReconstructsMatrix) {
  Eigen::Matrix3d d;
  d << 0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5;
  const auto terms = birkhoff_decompose(d);
  Eigen::Matrix3d sum = Eigen::Matrix3d::Zero();
  for (const auto& t : terms)
    for (int i = 0; i < 3; ++i) sum(i, t.permutation[i]) += t.weight;
  EXPECT_LE((sum - d).cwiseAbs().maxCoeff(), 1e-12);
  // The identity carries the largest bottleneck and comes first.
  EXPECT_EQ(terms.front().permutation, (std::vector<int>{0, 1, 2}));
  EXPECT_NEAR(terms.front().weight, 0.5, 1e-12);
}

TEST(RaReChannel, WeightsMustFormDistribution) {
  const auto bit = make_classical(2);
  EXPECT_THROW(RaReChannel(bit, {{0.5, 0}, {0.4, 1}}), PreconditionError);
  EXPECT_THROW(RaReChannel(bit, {{1.0, 5}}), StructuralError);
}

}  // namespace
}  // namespace entmix
