// Convex-roof entanglement of formation for two qubits.
//
// Ensembles of rho = sum_k lambda_k |v_k><v_k| are parameterized by the first
// r columns W of an m x m unitary V: member i is psi_i = sum_k W_ik sqrt(lambda_k) v_k
// (unnormalized). The average marginal entropy is minimized by steepest
// descent on U(m) with a Cayley retraction and Armijo backtracking.

#include "entmix/quantum.hpp"

#include <cmath>
#include <limits>

namespace entmix::quantum {

namespace {

struct MemberTerm {
  double value = 0.0;  // p * S(rho_A / p) in bits
  Eigen::Vector4cd grad;
};

// Entropy contribution of one unnormalized member and its Wirtinger gradient.
MemberTerm member_term(const Eigen::Vector4cd& psi, bool want_grad) {
  Eigen::Matrix2cd m;
  m << psi(0), psi(1), psi(2), psi(3);
  const Eigen::Matrix2cd x = m * m.adjoint();
  const double a = x(0, 0).real();
  const double d = x(1, 1).real();
  const double mean = 0.5 * (a + d);
  const double r = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(x(0, 1)));
  const double mu1 = mean + r;
  const double mu2 = std::max(0.0, mean - r);
  const double p = mu1 + mu2;

  MemberTerm out;
  out.grad.setZero();
  if (p <= 1e-300) return out;
  auto xlog = [](double v) { return v > 0.0 ? v * std::log2(v) : 0.0; };
  out.value = -xlog(mu1) - xlog(mu2) + xlog(p);
  if (!want_grad) return out;

  Eigen::Matrix2cd l;
  const double lp = std::log2(p);
  if (r <= 1e-14 * mean) {
    l = (std::log2(mean) - lp) * Eigen::Matrix2cd::Identity();
  } else {
    const Eigen::Matrix2cd p1 = (x - mu2 * Eigen::Matrix2cd::Identity()) / (mu1 - mu2);
    const Eigen::Matrix2cd p2 = Eigen::Matrix2cd::Identity() - p1;
    // The kernel direction of x never meets m, so its log is irrelevant.
    const double l2 = mu2 > 1e-300 ? std::log2(mu2) : 0.0;
    l = (std::log2(mu1) - lp) * p1 + (mu2 > 1e-300 ? l2 - lp : 0.0) * p2;
  }
  const Eigen::Matrix2cd g = -l * m;
  out.grad << g(0, 0), g(0, 1), g(1, 0), g(1, 1);
  return out;
}

class RoofObjective {
 public:
  RoofObjective(Eigen::MatrixXcd scaled_vectors, int ensemble_size)
      : a_(std::move(scaled_vectors)), m_(ensemble_size), r_(static_cast<int>(a_.cols())) {}

  int size() const { return m_; }

  double value(const Eigen::MatrixXcd& v) const {
    const Eigen::MatrixXcd members = a_ * v.leftCols(r_).transpose();
    double total = 0.0;
    for (int i = 0; i < m_; ++i) total += member_term(members.col(i), false).value;
    return total;
  }

  // Euclidean gradient dF/dV* (m x m, zero beyond the first r columns).
  double value_and_gradient(const Eigen::MatrixXcd& v, Eigen::MatrixXcd& grad) const {
    const Eigen::MatrixXcd members = a_ * v.leftCols(r_).transpose();
    Eigen::MatrixXcd g(4, m_);
    double total = 0.0;
    for (int i = 0; i < m_; ++i) {
      const auto t = member_term(members.col(i), true);
      total += t.value;
      g.col(i) = t.grad;
    }
    grad = Eigen::MatrixXcd::Zero(m_, m_);
    grad.leftCols(r_) = (a_.adjoint() * g).transpose();
    return total;
  }

  Eigen::MatrixXcd members(const Eigen::MatrixXcd& v) const { return a_ * v.leftCols(r_).transpose(); }

 private:
  Eigen::MatrixXcd a_;
  int m_;
  int r_;
};

Eigen::MatrixXcd cayley_step(const Eigen::MatrixXcd& v, const Eigen::MatrixXcd& k, double t) {
  const Eigen::Index n = k.rows();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd lhs = id - 0.5 * t * k;
  const Eigen::MatrixXcd rhs = id + 0.5 * t * k;
  return v * lhs.partialPivLu().solve(rhs);
}

double descend(const RoofObjective& f, Eigen::MatrixXcd& v, const EofOptions& opts) {
  Eigen::MatrixXcd grad;
  double value = f.value_and_gradient(v, grad);
  double step = 1.0;
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const Eigen::MatrixXcd z = v.adjoint() * grad;
    const Eigen::MatrixXcd k = -(z - z.adjoint());  // descent direction, skew-Hermitian
    const double slope = k.squaredNorm();
    if (slope < opts.gradient_tol * opts.gradient_tol) break;

    bool accepted = false;
    step = std::min(step * 2.0, 1e3);
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::MatrixXcd trial = cayley_step(v, k, step);
      const double tv = f.value(trial);
      if (tv <= value - 1e-4 * step * slope) {
        v = trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double previous = value;
    value = f.value_and_gradient(v, grad);
    if (previous - value < 1e-15) break;
  }
  return value;
}

}  // namespace

EofResult entanglement_of_formation(const DensityMatrix& rho_ab, const EofOptions& options) {
  if (rho_ab.dim() != 4) throw UnsupportedError("entanglement of formation is implemented for 2x2 systems only");
  if (std::abs(rho_ab.trace() - 1.0) > 1e-10) throw PreconditionError("entanglement of formation needs a normalized state");

  const auto sp = spectral(rho_ab.matrix());
  int rank = 0;
  while (rank < 4 && sp.values(rank) > 1e-12) ++rank;

  Eigen::MatrixXcd a(4, rank);
  for (int k = 0; k < rank; ++k) a.col(k) = std::sqrt(sp.values(k)) * sp.vectors.col(k);

  EofResult best;
  if (rank == 1) {
    best.value = entanglement_entropy(sp.vectors.col(0), 2, 2);
    best.ensemble_size = 1;
    best.probabilities = {1.0};
    best.members = {sp.vectors.col(0)};
    return best;
  }

  const int m = rank * rank;
  RoofObjective f(a, m);
  CounterRng rng(options.seed, 0xe0f);
  best.value = std::numeric_limits<double>::infinity();
  Eigen::MatrixXcd best_v;
  for (int s = 0; s < options.starts; ++s) {
    CounterRng local = rng.fork(static_cast<std::uint64_t>(s));
    Eigen::MatrixXcd v = s == 0 ? Eigen::MatrixXcd::Identity(m, m) : random_unitary(local, m);
    const double value = descend(f, v, options);
    if (value < best.value) {
      best.value = value;
      best_v = v;
    }
  }

  const Eigen::MatrixXcd members = f.members(best_v);
  best.ensemble_size = m;
  for (int i = 0; i < m; ++i) {
    const double p = members.col(i).squaredNorm();
    best.probabilities.push_back(p);
    best.members.push_back(p > 0 ? Eigen::VectorXcd(members.col(i) / std::sqrt(p)) : Eigen::VectorXcd(members.col(i)));
  }
  best.value = std::max(0.0, best.value);
  return best;
}

}  // namespace entmix::quantum
