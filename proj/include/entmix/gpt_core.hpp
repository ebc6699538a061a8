#pragma once

#include "entmix/common.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace entmix {

/**
 * A finite GPT system in affine-embedded coordinates.
 *
 * States are column vectors of length `dim`, effects are row vectors, and the
 * unit effect evaluates a state to its norm. The reversible group is stored as
 * an explicit list of matrices; element 0 is not required to be the identity.
 */
struct TheorySystem {
  std::string name;
  int dim = 0;
  Eigen::RowVectorXd unit_effect;
  std::vector<Eigen::VectorXd> pure_states;
  std::vector<Eigen::RowVectorXd> extremal_effects;
  std::vector<Eigen::MatrixXd> group;
};

using SystemPtr = std::shared_ptr<const TheorySystem>;

struct Violation {
  std::string invariant;
  int index = -1;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool cites(const std::string& invariant) const;
};

/// Checks every TheorySystem invariant. Dimension mismatches throw
/// StructuralError naming the offending field; all other failures are
/// collected into the report.
ValidationReport validate_system(const TheorySystem& sys, double tol = kTol);

/// Classical n-level system with the full symmetric group (n <= 6).
SystemPtr make_classical(int n);

/// Square bit: vertices (+-1, +-1) embedded as (x, y, 1) with the dihedral
/// group D4 acting on (x, y).
SystemPtr make_square_bit();

/// Index of the vertex that `g` maps vertex `i` to, for each i; nullopt when
/// some image is not a vertex.
std::optional<std::vector<int>> vertex_permutation(const TheorySystem& sys, const Eigen::MatrixXd& g,
                                                   double tol = kTol);

/// Index of the group element equal to `m`, if any.
std::optional<int> find_group_element(const TheorySystem& sys, const Eigen::MatrixXd& m, double tol = kTol);

class GptState {
 public:
  GptState(SystemPtr system, Eigen::VectorXd vec);

  const SystemPtr& system() const { return system_; }
  const Eigen::VectorXd& vec() const { return vec_; }
  double norm() const { return system_->unit_effect.dot(vec_); }
  bool normalized(double tol = kTol) const { return std::abs(norm() - 1.0) <= tol; }

 private:
  SystemPtr system_;
  Eigen::VectorXd vec_;
};

class Effect {
 public:
  Effect(SystemPtr system, Eigen::RowVectorXd covec);

  const SystemPtr& system() const { return system_; }
  const Eigen::RowVectorXd& covec() const { return covec_; }
  double operator()(const GptState& state) const { return covec_.dot(state.vec()); }

 private:
  SystemPtr system_;
  Eigen::RowVectorXd covec_;
};

/// Effects summing to the unit effect.
class Measurement {
 public:
  explicit Measurement(std::vector<Effect> effects, double tol = kTol);

  const std::vector<Effect>& effects() const { return effects_; }
  std::vector<double> outcome_probabilities(const GptState& state) const;

 private:
  std::vector<Effect> effects_;
};

/// A linear map that preserves the norm: u_out * M == u_in.
class GptChannel {
 public:
  GptChannel(SystemPtr input, SystemPtr output, Eigen::MatrixXd matrix, double tol = kTol);

  static GptChannel identity(const SystemPtr& system);

  const SystemPtr& input() const { return input_; }
  const SystemPtr& output() const { return output_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  SystemPtr input_;
  SystemPtr output_;
  Eigen::MatrixXd matrix_;
};

class Instrument {
 public:
  Instrument(SystemPtr input, SystemPtr output, std::vector<Eigen::MatrixXd> branches, double tol = kTol);

  const std::vector<Eigen::MatrixXd>& branches() const { return branches_; }
  GptChannel coarse_grained() const;

 private:
  SystemPtr input_;
  SystemPtr output_;
  std::vector<Eigen::MatrixXd> branches_;
};

GptState apply_channel(const GptChannel& channel, const GptState& state);

/// Applies a single group element of the state's own system.
GptState apply_group_element(int index, const GptState& state);

}  // namespace entmix
