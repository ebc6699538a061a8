#pragma once

// Resource theory of purity on finite GPT systems: the "more mixed" preorder
// decided by convex feasibility over group orbits, the invariant state, orbit
// hulls, and explicit random-reversible (RaRe) channels.

#include "entmix/gpt_core.hpp"

#include <optional>
#include <span>
#include <vector>

namespace entmix {

struct RaReEntry {
  double weight = 0.0;
  int group_index = 0;
};

/// Convex mixture of group elements of `system`.
class RaReChannel {
 public:
  RaReChannel(SystemPtr system, std::vector<RaReEntry> entries, double tol = 1e-12);

  const SystemPtr& system() const { return system_; }
  const std::vector<RaReEntry>& entries() const { return entries_; }
  Eigen::MatrixXd matrix() const;
  GptState apply(const GptState& state) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& vec) const { return matrix() * vec; }

 private:
  SystemPtr system_;
  std::vector<RaReEntry> entries_;
};

struct FeasibilityCertificate {
  bool feasible = false;
  Eigen::VectorXd weights;  // empty when infeasible
  double residual = 0.0;    // max-norm reconstruction error of the witness
};

/// Decides whether `target` is a convex combination of `generators` with a
/// phase-1 simplex; feasible certificates carry the witness weights.
FeasibilityCertificate feasible_convex_combination(std::span<const Eigen::VectorXd> generators,
                                                   const Eigen::VectorXd& target);

/// Feasible iff sigma = sum_i w_i U_i rho, i.e. sigma is more mixed than rho.
/// The weights are indexed by the system's group.
FeasibilityCertificate more_mixed(const GptState& rho, const GptState& sigma);

struct EqualMixedness {
  bool equal = false;
  /// Group element U with U rho = sigma, when equal and one exists.
  std::optional<int> witness;
};

EqualMixedness equally_mixed(const GptState& rho, const GptState& sigma);

/// Group average of a pure state, checked to be seed-independent, invariant,
/// and the maximum of the preorder.
GptState invariant_state(const SystemPtr& system);

/// Extreme points of the convex hull of the group orbit of rho.
std::vector<Eigen::VectorXd> orbit_hull(const GptState& rho);

/// Sum of the k largest entries of p dominates that of q for every k.
bool majorizes(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double tol = 1e-10);

/// Weights over permutation matrices with sum_i w_i P_i p = q. The channel
/// lives on make_classical(n) and its group indices follow that system's
/// lexicographic permutation order.
RaReChannel birkhoff_rare_synthesis(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Permutation pi with (P x)_i = x_{pi(i)} for element `index` of make_classical(n).
std::vector<int> permutation_of(const TheorySystem& classical, int index);

/// Doubly stochastic D with D p = q, built from T-transforms (exposed for tests).
Eigen::MatrixXd t_transform_matrix(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

struct BirkhoffTerm {
  double weight = 0.0;
  std::vector<int> permutation;
};

/// Greedy Birkhoff decomposition: each step removes the support permutation
/// with the largest bottleneck, lexicographically smallest among ties.
std::vector<BirkhoffTerm> birkhoff_decompose(const Eigen::MatrixXd& doubly_stochastic, double tol = 1e-12);

}  // namespace entmix
