#include "entmix/mixedness.hpp"
#include "entmix/monotones.hpp"
#include "entmix/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace entmix {
namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double witness_value(const MonotoneReport& r, const GptState& s, const ConvexScalarFn& f) {
  double total = 0.0;
  for (const auto& e : r.witness) total += f(e.dot(s.vec()));
  return total;
}

TEST(ConvexScalarFn, ConventionsAndConvexity) {
  EXPECT_EQ(ConvexScalarFn::xlogx()(0.0), 0.0);
  EXPECT_DOUBLE_EQ(ConvexScalarFn::xlogx()(0.5), -0.5);
  EXPECT_TRUE(ConvexScalarFn::xlogx().check_convexity());
  EXPECT_TRUE(ConvexScalarFn::square().check_convexity());
  const auto wavy = ConvexScalarFn::custom("sin10", [](double x) { return std::sin(10 * x); }, false);
  EXPECT_FALSE(wavy.check_convexity());
}

TEST(Enumeration, ClassicalBitMeasurements) {
  // Splits of 4/4 e_j into outcomes: partitions of 4 for each of the two effects.
  const auto ms = enumerate_pure_measurements(*make_classical(2));
  EXPECT_EQ(ms.size(), 25u);
  for (const auto& m : ms) {
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(2);
    for (const auto& e : m) sum += e;
    EXPECT_TRUE(sum.isApprox(Eigen::RowVector2d(1, 1)));
  }
}

TEST(Enumeration, BoundIsReported) {
  MeasurementEnumeration tiny;
  tiny.max_measurements = 3;
  EXPECT_THROW(enumerate_pure_measurements(*make_classical(3), tiny), CapacityError);
  const GptState s(make_classical(3), vec({0.5, 0.3, 0.2}));
  try {
    f_purity(s, ConvexScalarFn::square(), tiny);
    FAIL() << "expected EnumerationBoundError";
  } catch (const EnumerationBoundError& e) {
    EXPECT_TRUE(e.partial().lower_bound);
    EXPECT_GT(e.partial().value, 0.0);
  }
}

TEST(FPurity, TritSquareUsesFineGrainedMeasurement) {
  const GptState s(make_classical(3), vec({0.5, 0.3, 0.2}));
  const auto f = ConvexScalarFn::square();
  const auto r = f_purity(s, f);
  EXPECT_NEAR(r.value, 0.38, 1e-12);
  EXPECT_EQ(r.witness.size(), 3u);
  EXPECT_NEAR(witness_value(r, s, f), r.value, 1e-10);
}

TEST(FPurity, SquareCenterXlogx) {
  const GptState center(make_square_bit(), Eigen::Vector3d(0, 0, 1));
  const auto f = ConvexScalarFn::xlogx();
  const auto r = f_purity(center, f);
  EXPECT_NEAR(r.value, -1.0, 1e-12);
  EXPECT_NEAR(witness_value(r, center, f), r.value, 1e-10);
}

TEST(FPurity, PureStatesReachOne) {
  for (const auto& sys : {make_square_bit(), make_classical(4)}) {
    for (const auto& v : sys->pure_states) EXPECT_NEAR(f_purity(GptState(sys, v), ConvexScalarFn::square()).value, 1.0, 1e-12);
  }
}

TEST(MeasurementEntropy, Examples) {
  EXPECT_NEAR(measurement_entropy(quantum::DensityMatrix::maximally_mixed(2)).value, 1.0, 1e-12);
  EXPECT_NEAR(measurement_entropy(GptState(make_square_bit(), Eigen::Vector3d(0, 0, 1))).value, 1.0, 1e-12);
  CounterRng rng(9);
  const Eigen::VectorXcd psi = random_unit_vector(rng, 3);
  EXPECT_NEAR(measurement_entropy(quantum::DensityMatrix(psi * psi.adjoint())).value, 0.0, 1e-9);
}

TEST(MeasurementEntropy, QuantumDiagonalMatchesClassical) {
  CounterRng rng(4);
  for (int n = 2; n <= 4; ++n) {
    const auto w = random_simplex_point(rng, n);
    const Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
    const double quantum_value = measurement_entropy(quantum::DensityMatrix::diagonal(p)).value;
    const double classical_value = measurement_entropy(GptState(make_classical(n), p)).value;
    EXPECT_NEAR(quantum_value, classical_value, 1e-10);
  }
}

// Sanity check of the projective optimum: random orthonormal bases never beat
// the eigenbasis.
TEST(MeasurementEntropy, SampledRankOneMeasurementsNeverBeatSpectrum) {
  CounterRng rng(12);
  for (int t = 0; t < 20; ++t) {
    const quantum::DensityMatrix rho(random_density(rng, 3, 3));
    const double best = measurement_entropy(rho).value;
    for (int k = 0; k < 50; ++k) {
      const Eigen::MatrixXcd u = random_unitary(rng, 3);
      Eigen::VectorXd p(3);
      for (int i = 0; i < 3; ++i) p(i) = (u.col(i).adjoint() * rho.matrix() * u.col(i))(0, 0).real();
      EXPECT_GE(quantum::shannon_bits(p.cwiseMax(0.0)), best - 1e-9);
    }
  }
}

TEST(OpNorm, ClassicalBit) {
  const auto bit = make_classical(2);
  const auto r = op_norm_report(GptState(bit, vec({1, 0})), invariant_state(bit));
  EXPECT_NEAR(r.value, 0.5, 1e-12);
  ASSERT_EQ(r.witness.size(), 2u);
  const Eigen::VectorXd delta = vec({0.5, -0.5});
  EXPECT_NEAR(0.5 * (r.witness[0].dot(delta) - r.witness[1].dot(delta)), r.value, 1e-10);
  EXPECT_NEAR(op_norm_distance(GptState(bit, vec({0.75, 0.25}))), 0.25, 1e-12);
  EXPECT_NEAR(op_norm_distance(invariant_state(bit)), 0.0, 1e-12);
  EXPECT_NEAR(op_norm_distance(invariant_state(make_square_bit())), 0.0, 1e-12);
}

TEST(Purity2Norm, Examples) {
  CounterRng rng(2);
  const Eigen::VectorXcd psi = random_unit_vector(rng, 3);
  EXPECT_NEAR(purity_2norm(quantum::DensityMatrix(psi * psi.adjoint())), 1.0, 1e-12);
  EXPECT_NEAR(purity_2norm(quantum::DensityMatrix::maximally_mixed(2)), 0.5, 1e-12);
  EXPECT_NEAR(purity_2norm(GptState(make_classical(2), vec({0.7, 0.3}))), 0.58, 1e-12);
}

TEST(Purity2Norm, DegenerateFormIsUnsupported) {
  auto sys = std::make_shared<TheorySystem>(*make_classical(2));
  sys->group = {Eigen::Matrix2d::Zero()};
  EXPECT_THROW(invariant_quadratic_form(*sys), UnsupportedError);
}

// The x^2-purity and the 2-norm purity are different functions on the square
// bit; the gap is measured, not assumed to vanish.
TEST(Purity2Norm, GapToX2PurityOnSquareBitIsMeasured) {
  const auto sq = make_square_bit();
  double max_gap = 0.0;
  for (double x : {0.0, 0.3, 0.7, 1.0})
    for (double y : {0.0, 0.4, 1.0}) {
      const GptState s(sq, Eigen::Vector3d(x, y, 1.0));
      const double p2 = purity_2norm(s);
      EXPECT_NEAR(p2, x * x + y * y + 1.0, 1e-12);
      max_gap = std::max(max_gap, std::abs(p2 - f_purity(s, ConvexScalarFn::square()).value));
    }
  EXPECT_GT(max_gap, 0.1);
}

TEST(Monotones, InvarianceOnVerticesAndOrbits) {
  const std::vector<std::string> names{"x2-purity", "xlogx-purity", "op-norm", "purity-2norm", "neg-entropy"};
  CounterRng rng(31);
  for (const auto& sys : {make_square_bit(), make_classical(3)}) {
    for (const auto& name : names) {
      const auto p = builtin_monotone(name);
      for (int t = 0; t < 10; ++t) {
        const auto w = random_simplex_point(rng, static_cast<int>(sys->pure_states.size()));
        Eigen::VectorXd v = Eigen::VectorXd::Zero(sys->dim);
        for (std::size_t i = 0; i < w.size(); ++i) v += w[i] * sys->pure_states[i];
        const GptState s(sys, v);
        for (std::size_t g = 0; g < sys->group.size(); ++g)
          EXPECT_NEAR(p(apply_group_element(static_cast<int>(g), s)), p(s), 1e-9) << name;
      }
    }
  }
}

TEST(Monotones, ConvexityOnMixtures) {
  const std::vector<std::string> names{"x2-purity", "xlogx-purity", "op-norm", "purity-2norm"};
  CounterRng rng(17);
  for (const auto& sys : {make_square_bit(), make_classical(4)}) {
    const int nv = static_cast<int>(sys->pure_states.size());
    for (const auto& name : names) {
      const auto p = builtin_monotone(name);
      for (int t = 0; t < 30; ++t) {
        auto draw = [&] {
          const auto w = random_simplex_point(rng, nv);
          Eigen::VectorXd v = Eigen::VectorXd::Zero(sys->dim);
          for (int i = 0; i < nv; ++i) v += w[i] * sys->pure_states[i];
          return v;
        };
        const Eigen::VectorXd a = draw(), b = draw();
        const double lam = rng.uniform();
        const double mixed = p(GptState(sys, lam * a + (1 - lam) * b));
        EXPECT_LE(mixed, lam * p(GptState(sys, a)) + (1 - lam) * p(GptState(sys, b)) + 1e-9) << name;
      }
    }
  }
}

TEST(SchurCheck, BuiltinsHaveNoViolations) {
  EXPECT_TRUE(schur_convexity_check(builtin_monotone("purity-2norm"), make_classical(3), 1000, 1).violations.empty());
  EXPECT_TRUE(schur_convexity_check(builtin_monotone("neg-entropy"), make_classical(3), 200, 2).violations.empty());
  EXPECT_TRUE(schur_convexity_check(builtin_monotone("x2-purity"), make_square_bit(), 200, 3).violations.empty());
}

TEST(SchurCheck, NonConvexFunctionIsCaught) {
  const auto wavy = ConvexScalarFn::custom("sin10", [](double x) { return std::sin(10 * x); }, false);
  const PurityFunction p = [&](const GptState& s) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < s.vec().size(); ++i) total += wavy(s.vec()(i));
    return total;
  };
  const auto report = schur_convexity_check(p, make_classical(3), 300, 4);
  EXPECT_FALSE(report.violations.empty());
  const auto& v = report.violations.front();
  EXPECT_GT(v.value_sigma, v.value_rho);
}

TEST(Monotones, UnknownNameRejected) { EXPECT_THROW(builtin_monotone("nope"), PreconditionError); }

}  // namespace
}  // namespace entmix
