#pragma once

// Purity monotones: f-purities over enumerated pure measurements, measurement
// entropy, operational-norm distance to the invariant state and 2-norm purity.

#include "entmix/gpt_core.hpp"
#include "entmix/quantum.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace entmix {

class ConvexScalarFn {
 public:
  enum class Tag { xlogx, square, custom };

  /// x log2 x with 0 log 0 = 0.
  static ConvexScalarFn xlogx();
  static ConvexScalarFn square();
  static ConvexScalarFn custom(std::string name, std::function<double(double)> fn, bool convex);

  Tag tag() const { return tag_; }
  const std::string& name() const { return name_; }
  bool convex() const { return convex_; }
  double operator()(double x) const { return fn_(x); }

  /// Random midpoint test of convexity on [0, 1]; false on the first violation.
  bool check_convexity(int trials = 1000, std::uint64_t seed = 1) const;

 private:
  ConvexScalarFn(Tag tag, std::string name, std::function<double(double)> fn, bool convex)
      : tag_(tag), name_(std::move(name)), fn_(std::move(fn)), convex_(convex) {}

  Tag tag_;
  std::string name_;
  std::function<double(double)> fn_;
  bool convex_;
};

struct MonotoneReport {
  std::string name;
  double value = 0.0;
  /// Effects of the optimal measurement, or the (sup, inf) effect pair for
  /// the operational norm. Empty for quantum reports.
  std::vector<Eigen::RowVectorXd> witness;
  /// Eigenbasis witness for quantum reports (columns are projector vectors).
  Eigen::MatrixXcd quantum_witness;
  bool lower_bound = false;
};

/// Measurement enumeration bounds: outcomes are (k / max_denominator) * a for
/// extremal effects a, and every way of splitting an effect into outcomes is
/// listed.
struct MeasurementEnumeration {
  int max_denominator = 4;
  std::size_t max_measurements = 200000;
};

/// Raised when enumeration stops at the bound; carries the best value found,
/// which is a lower bound on the supremum.
class EnumerationBoundError : public std::runtime_error {
 public:
  EnumerationBoundError(const std::string& what, MonotoneReport partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const MonotoneReport& partial() const { return partial_; }

 private:
  MonotoneReport partial_;
};

/// Every enumerated pure measurement, as lists of effect covectors.
std::vector<std::vector<Eigen::RowVectorXd>> enumerate_pure_measurements(const TheorySystem& sys,
                                                                         const MeasurementEnumeration& strategy = {});

MonotoneReport f_purity(const GptState& rho, const ConvexScalarFn& f, const MeasurementEnumeration& strategy = {});

/// Minimum Shannon entropy (bits) over pure measurements.
MonotoneReport measurement_entropy(const GptState& rho, const MeasurementEnumeration& strategy = {});
/// Spectral entropy with the eigenbasis as the optimal projective measurement.
MonotoneReport measurement_entropy(const quantum::DensityMatrix& rho);

/// Half the operational norm of rho - chi, via two LPs over the effect polytope.
double op_norm_distance(const GptState& rho);
/// Same, with a precomputed invariant state.
MonotoneReport op_norm_report(const GptState& rho, const GptState& chi);

/// Averaged quadratic form sum_g g^T g / |G| under which the group acts
/// orthogonally; throws UnsupportedError when degenerate.
Eigen::MatrixXd invariant_quadratic_form(const TheorySystem& sys);

double purity_2norm(const GptState& rho);
double purity_2norm(const quantum::DensityMatrix& rho);

using PurityFunction = std::function<double(const GptState&)>;

struct SchurViolation {
  Eigen::VectorXd rho;
  Eigen::VectorXd sigma;
  double value_rho = 0.0;
  double value_sigma = 0.0;
};

struct SchurReport {
  int trials = 0;
  std::vector<SchurViolation> violations;
};

/// Samples pairs (rho, sigma = sum_i w_i U_i rho) and records every case with
/// P(sigma) > P(rho) + tol.
SchurReport schur_convexity_check(const PurityFunction& monotone, const SystemPtr& system, int trials,
                                  std::uint64_t seed, double tol = 1e-9);

/// Built-in monotones by CLI name: x2-purity, xlogx-purity, neg-entropy,
/// op-norm, purity-2norm.
PurityFunction builtin_monotone(const std::string& name);

}  // namespace entmix
