#pragma once

// Finite-dimensional quantum backend. Bipartite vectors use the index
// convention |i>|j> -> i * d_B + j.

#include "entmix/common.hpp"
#include "entmix/random.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace entmix::quantum {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

class DensityMatrix {
 public:
  explicit DensityMatrix(MatrixXcd m, double tol = 1e-10);

  static DensityMatrix diagonal(const VectorXd& p);
  static DensityMatrix maximally_mixed(int d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const MatrixXcd& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }
  double purity() const;

 private:
  MatrixXcd m_;
};

class PureBipartiteState {
 public:
  PureBipartiteState(int d_a, int d_b, VectorXcd amplitudes, double tol = 1e-10);

  /// (|00> + |11> + ...)/sqrt(d).
  static PureBipartiteState maximally_entangled(int d);
  /// sum_i sqrt(p_i) |i>|i>.
  static PureBipartiteState from_schmidt(const VectorXd& squared_coefficients);
  static PureBipartiteState product(const VectorXcd& a, const VectorXcd& b);

  int dim_a() const { return d_a_; }
  int dim_b() const { return d_b_; }
  const VectorXcd& amplitudes() const { return psi_; }
  /// d_A x d_B matrix M with psi = sum_ij M_ij |i>|j>.
  MatrixXcd coefficient_matrix() const;

 private:
  int d_a_;
  int d_b_;
  VectorXcd psi_;
};

struct SchmidtData {
  VectorXd coefficients;  // descending, length min(d_A, d_B)
  MatrixXcd left;         // columns alpha_i
  MatrixXcd right;        // columns beta_i

  VectorXd squared() const { return coefficients.array().square(); }
  VectorXcd reconstruct() const;
};

class KrausChannel {
 public:
  explicit KrausChannel(std::vector<MatrixXcd> ops, double tol = 1e-9);

  const std::vector<MatrixXcd>& ops() const { return ops_; }
  int dim_in() const { return static_cast<int>(ops_.front().cols()); }
  int dim_out() const { return static_cast<int>(ops_.front().rows()); }
  double completeness_residual() const;
  MatrixXcd apply(const MatrixXcd& rho) const;

 private:
  std::vector<MatrixXcd> ops_;
};

/// Convex mixture of unitaries: rho -> sum_i w_i U_i rho U_i^dagger.
struct UnitaryMixture {
  std::vector<double> weights;
  std::vector<MatrixXcd> unitaries;

  MatrixXcd apply(const MatrixXcd& rho) const;
};

struct OneWayProtocol {
  std::vector<MatrixXcd> bob_instrument;     // Kraus operators B_i
  std::vector<MatrixXcd> alice_corrections;  // unitaries A_i
  std::vector<double> outcome_probs;
};

struct ProtocolCheck {
  double completeness = 0.0;      // ||sum_i B_i^dag B_i - I||_max
  double proportionality = 0.0;   // max_i ||(A_i x B_i) psi - sqrt(p_i) psi'||
  double overlap = 0.0;           // max_i | |<psi'|(A_i x B_i)|psi>| - sqrt(p_i) |
};

struct Spectral {
  VectorXd values;    // descending
  MatrixXcd vectors;  // matching columns
};

/// Eigendecomposition with descending eigenvalues and a fixed phase and
/// tie-break convention.
Spectral spectral(const MatrixXcd& hermitian);

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b);
VectorXcd kron(const VectorXcd& a, const VectorXcd& b);
MatrixXcd partial_trace_b(const MatrixXcd& rho, int d_a, int d_b);
MatrixXcd partial_trace_a(const MatrixXcd& rho, int d_a, int d_b);
/// Shannon entropy in bits, 0 log 0 = 0.
double shannon_bits(const VectorXd& p);

SchmidtData schmidt_decompose(const PureBipartiteState& psi);
std::pair<DensityMatrix, DensityMatrix> marginals(const PureBipartiteState& psi);

PureBipartiteState purify(const DensityMatrix& rho);
PureBipartiteState symmetric_purify(const DensityMatrix& rho);

/// Psi can be converted into Psi' by LOCC: the squared Schmidt coefficients of
/// Psi are majorized by those of Psi'.
bool nielsen_convertible(const PureBipartiteState& psi, const PureBipartiteState& target);
bool lu_equivalent(const PureBipartiteState& psi, const PureBipartiteState& other, double tol = 1e-9);

/// Channels C: A -> B and D: B -> A with (C x D)(Psi) = SWAP Psi.
std::pair<KrausChannel, KrausChannel> local_exchange_channels(const PureBipartiteState& psi);

/// Applies C x D to |psi><psi| and returns the max-norm distance to the
/// swapped projector.
double local_exchange_residual(const PureBipartiteState& psi, const KrausChannel& c, const KrausChannel& d);

/// Weights and unitaries with sum_i w_i U_i rho' U_i^dag = rho.
UnitaryMixture rare_synthesis_quantum(const DensityMatrix& rho, const DensityMatrix& rho_prime);

/// One-way LOCC (Bob measures, Alice corrects) turning psi into target, where
/// `rare` maps the marginal of target to the marginal of psi.
OneWayProtocol one_way_locc_from_rare(const PureBipartiteState& psi, const PureBipartiteState& target,
                                      const UnitaryMixture& rare);

ProtocolCheck check_protocol(const OneWayProtocol& protocol, const PureBipartiteState& psi,
                             const PureBipartiteState& target);

struct EofOptions {
  int starts = 6;
  int max_iterations = 400;
  std::uint64_t seed = 1;
  double gradient_tol = 1e-10;
};

struct EofResult {
  double value = 0.0;
  int ensemble_size = 0;
  std::vector<double> probabilities;
  std::vector<VectorXcd> members;
};

/// Convex-roof entanglement of formation (ebits) of a two-qubit state,
/// minimized over ensemble decompositions.
EofResult entanglement_of_formation(const DensityMatrix& rho_ab, const EofOptions& options = {});

/// Pure-state entanglement: entropy (bits) of the A marginal.
double entanglement_entropy(const VectorXcd& psi, int d_a, int d_b);

struct ErasureCertificate {
  bool possible = false;
  double purity = 0.0;  // Tr rho^2
  double margin = 0.0;  // 1 - Tr rho^2
};

ErasureCertificate catalytic_erasure_possible(const DensityMatrix& rho);

PureBipartiteState random_pure_state(CounterRng& rng, int d_a, int d_b);

}  // namespace entmix::quantum
