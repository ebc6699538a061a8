#include "entmix/quantum.hpp"

#include "entmix/mixedness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace entmix::quantum {

namespace {

constexpr double kRankCut = 1e-12;

VectorXd padded(const VectorXd& v, Eigen::Index n) {
  VectorXd out = VectorXd::Zero(n);
  out.head(v.size()) = v;
  return out;
}

VectorXd truncated_squares(const SchmidtData& s) {
  VectorXd sq = s.squared();
  for (Eigen::Index i = 0; i < sq.size(); ++i)
    if (sq(i) < kRankCut) sq(i) = 0.0;
  return sq;
}

// Removes the phase of the first non-negligible component.
Complex leading_phase(const VectorXcd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v(i));
    if (mag > 1e-12) return v(i) / mag;
  }
  return Complex(1.0, 0.0);
}

bool lexicographically_less(const VectorXcd& a, const VectorXcd& b) {
  auto round = [](double x) { return std::round(x * 1e9) / 1e9; };
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double ar = round(a(i).real());
    const double br = round(b(i).real());
    if (ar != br) return ar < br;
    const double ai = round(a(i).imag());
    const double bi = round(b(i).imag());
    if (ai != bi) return ai < bi;
  }
  return false;
}

MatrixXcd pseudo_inverse(const MatrixXcd& x) {
  Eigen::JacobiSVD<MatrixXcd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& s = svd.singularValues();
  VectorXd inv = VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > kRankCut) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

VectorXcd vectorize(const MatrixXcd& m) {
  VectorXcd v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

}  // namespace

DensityMatrix::DensityMatrix(MatrixXcd m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw StructuralError("density matrix must be square and non-empty");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol) throw PreconditionError("density matrix is not Hermitian");
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) throw PreconditionError("density matrix has a negative eigenvalue");
  const double tr = m_.trace().real();
  if (tr < -tol || tr > 1.0 + tol) throw PreconditionError("density matrix trace outside [0, 1]");
}

DensityMatrix DensityMatrix::diagonal(const VectorXd& p) { return DensityMatrix(p.cast<Complex>().asDiagonal().toDenseMatrix()); }

DensityMatrix DensityMatrix::maximally_mixed(int d) {
  return DensityMatrix(MatrixXcd::Identity(d, d) / static_cast<double>(d));
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

PureBipartiteState::PureBipartiteState(int d_a, int d_b, VectorXcd amplitudes, double tol)
    : d_a_(d_a), d_b_(d_b), psi_(std::move(amplitudes)) {
  if (d_a < 1 || d_b < 1 || psi_.size() != static_cast<Eigen::Index>(d_a) * d_b)
    throw StructuralError("dimension mismatch: amplitude count differs from d_A * d_B");
  if (std::abs(psi_.norm() - 1.0) > tol) throw PreconditionError("pure bipartite state is not normalized");
}

PureBipartiteState PureBipartiteState::maximally_entangled(int d) {
  VectorXcd v = VectorXcd::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
  return PureBipartiteState(d, d, v);
}

PureBipartiteState PureBipartiteState::from_schmidt(const VectorXd& squared_coefficients) {
  const int d = static_cast<int>(squared_coefficients.size());
  VectorXcd v = VectorXcd::Zero(d * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = std::sqrt(std::max(0.0, squared_coefficients(i)));
  return PureBipartiteState(d, d, v);
}

PureBipartiteState PureBipartiteState::product(const VectorXcd& a, const VectorXcd& b) {
  return PureBipartiteState(static_cast<int>(a.size()), static_cast<int>(b.size()), kron(a, b));
}

MatrixXcd PureBipartiteState::coefficient_matrix() const {
  MatrixXcd m(d_a_, d_b_);
  for (int i = 0; i < d_a_; ++i)
    for (int j = 0; j < d_b_; ++j) m(i, j) = psi_(i * d_b_ + j);
  return m;
}

VectorXcd SchmidtData::reconstruct() const {
  VectorXcd v = VectorXcd::Zero(left.rows() * right.rows());
  for (Eigen::Index k = 0; k < coefficients.size(); ++k) v += coefficients(k) * kron(VectorXcd(left.col(k)), VectorXcd(right.col(k)));
  return v;
}

KrausChannel::KrausChannel(std::vector<MatrixXcd> ops, double tol) : ops_(std::move(ops)) {
  if (ops_.empty()) throw StructuralError("Kraus channel needs at least one operator");
  for (const auto& k : ops_)
    if (k.rows() != ops_.front().rows() || k.cols() != ops_.front().cols())
      throw StructuralError("Kraus operators have inconsistent shapes");
  if (completeness_residual() > tol) throw PreconditionError("Kraus operators are not trace preserving");
}

double KrausChannel::completeness_residual() const {
  MatrixXcd s = MatrixXcd::Zero(dim_in(), dim_in());
  for (const auto& k : ops_) s += k.adjoint() * k;
  return (s - MatrixXcd::Identity(dim_in(), dim_in())).cwiseAbs().maxCoeff();
}

MatrixXcd KrausChannel::apply(const MatrixXcd& rho) const {
  MatrixXcd out = MatrixXcd::Zero(dim_out(), dim_out());
  for (const auto& k : ops_) out += k * rho * k.adjoint();
  return out;
}

MatrixXcd UnitaryMixture::apply(const MatrixXcd& rho) const {
  MatrixXcd out = MatrixXcd::Zero(rho.rows(), rho.cols());
  for (std::size_t i = 0; i < weights.size(); ++i) out += weights[i] * unitaries[i] * rho * unitaries[i].adjoint();
  return out;
}

Spectral spectral(const MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitian);
  const Eigen::Index n = hermitian.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  std::vector<VectorXcd> vecs;
  for (Eigen::Index i = 0; i < n; ++i) {
    VectorXcd v = es.eigenvectors().col(i);
    vecs.push_back(v / leading_phase(v));
  }
  const VectorXd& vals = es.eigenvalues();
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (std::abs(vals(a) - vals(b)) > 1e-12) return vals(a) > vals(b);
    return lexicographically_less(vecs[static_cast<std::size_t>(a)], vecs[static_cast<std::size_t>(b)]);
  });

  Spectral out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = vals(order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = vecs[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
  }
  return out;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

VectorXcd kron(const VectorXcd& a, const VectorXcd& b) {
  VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

MatrixXcd partial_trace_b(const MatrixXcd& rho, int d_a, int d_b) {
  MatrixXcd out = MatrixXcd::Zero(d_a, d_a);
  for (int i = 0; i < d_a; ++i)
    for (int k = 0; k < d_a; ++k)
      for (int j = 0; j < d_b; ++j) out(i, k) += rho(i * d_b + j, k * d_b + j);
  return out;
}

MatrixXcd partial_trace_a(const MatrixXcd& rho, int d_a, int d_b) {
  MatrixXcd out = MatrixXcd::Zero(d_b, d_b);
  for (int j = 0; j < d_b; ++j)
    for (int l = 0; l < d_b; ++l)
      for (int i = 0; i < d_a; ++i) out(j, l) += rho(i * d_b + j, i * d_b + l);
  return out;
}

double shannon_bits(const VectorXd& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) h -= p(i) * std::log2(p(i));
  return h;
}

SchmidtData schmidt_decompose(const PureBipartiteState& psi) {
  const MatrixXcd m = psi.coefficient_matrix();
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtData out;
  out.coefficients = svd.singularValues();
  out.left = svd.matrixU();
  out.right = svd.matrixV().conjugate();
  for (Eigen::Index k = 0; k < out.left.cols(); ++k) {
    const Complex phase = leading_phase(out.left.col(k));
    out.left.col(k) /= phase;
    out.right.col(k) *= phase;
  }
  return out;
}

std::pair<DensityMatrix, DensityMatrix> marginals(const PureBipartiteState& psi) {
  const MatrixXcd m = psi.coefficient_matrix();
  MatrixXcd rho_a = m * m.adjoint();
  MatrixXcd rho_b = m.transpose() * m.conjugate();
  const VectorXd sa = spectral(rho_a).values;
  const VectorXd sb = spectral(rho_b).values;
  const Eigen::Index n = std::max(sa.size(), sb.size());
  if ((padded(sa, n) - padded(sb, n)).cwiseAbs().maxCoeff() > 1e-9)
    throw NumericalError("marginal spectra of a pure state disagree");
  return {DensityMatrix(std::move(rho_a)), DensityMatrix(std::move(rho_b))};
}

PureBipartiteState purify(const DensityMatrix& rho) {
  if (std::abs(rho.trace() - 1.0) > 1e-10) throw PreconditionError("purify needs a normalized state");
  const auto sp = spectral(rho.matrix());
  const int d = rho.dim();
  VectorXcd v = VectorXcd::Zero(d * d);
  for (int i = 0; i < d; ++i) {
    const double w = std::sqrt(std::max(0.0, sp.values(i)));
    for (int a = 0; a < d; ++a) v(a * d + i) += w * sp.vectors(a, i);
  }
  return PureBipartiteState(d, d, v / v.norm());
}

PureBipartiteState symmetric_purify(const DensityMatrix& rho) {
  if (std::abs(rho.trace() - 1.0) > 1e-10) throw PreconditionError("symmetric_purify needs a normalized state");
  const auto sp = spectral(rho.matrix());
  const int d = rho.dim();
  MatrixXcd m = MatrixXcd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double w = std::sqrt(std::max(0.0, sp.values(i)));
    m += w * sp.vectors.col(i) * sp.vectors.col(i).transpose();
  }
  VectorXcd v = vectorize(m);
  return PureBipartiteState(d, d, v / v.norm());
}

bool nielsen_convertible(const PureBipartiteState& psi, const PureBipartiteState& target) {
  const VectorXd a = truncated_squares(schmidt_decompose(psi));
  const VectorXd b = truncated_squares(schmidt_decompose(target));
  const Eigen::Index n = std::max(a.size(), b.size());
  return majorizes(padded(b, n), padded(a, n));
}

bool lu_equivalent(const PureBipartiteState& psi, const PureBipartiteState& other, double tol) {
  if (psi.dim_a() != other.dim_a() || psi.dim_b() != other.dim_b())
    throw StructuralError("dimension mismatch: LU equivalence needs equal dimensions");
  const VectorXd a = schmidt_decompose(psi).squared();
  const VectorXd b = schmidt_decompose(other).squared();
  return (a - b).cwiseAbs().maxCoeff() <= tol;
}

std::pair<KrausChannel, KrausChannel> local_exchange_channels(const PureBipartiteState& psi) {
  const auto s = schmidt_decompose(psi);
  const int da = psi.dim_a();
  const int db = psi.dim_b();
  Eigen::Index rank = 0;
  while (rank < s.coefficients.size() && s.coefficients(rank) > kRankCut) ++rank;

  // C = sum_k |beta_k><alpha_k| on the support, completed on its complement.
  auto build = [&](const MatrixXcd& from, const MatrixXcd& to, int d_from, int d_to) {
    MatrixXcd c = MatrixXcd::Zero(d_to, d_from);
    for (Eigen::Index k = 0; k < rank; ++k) c += to.col(k) * from.col(k).adjoint();
    const MatrixXcd rest = MatrixXcd::Identity(d_from, d_from) - c.adjoint() * c;
    std::vector<MatrixXcd> ops{c};
    if (d_from == d_to) {
      ops.push_back(rest);
    } else {
      const auto sp = spectral(rest);
      for (Eigen::Index k = 0; k < sp.values.size(); ++k) {
        if (sp.values(k) < 0.5) continue;
        ops.push_back(to.col(0) * sp.vectors.col(k).adjoint());
      }
    }
    return KrausChannel(std::move(ops));
  };
  return {build(s.left, s.right, da, db), build(s.right, s.left, db, da)};
}

double local_exchange_residual(const PureBipartiteState& psi, const KrausChannel& c, const KrausChannel& d) {
  const int da = psi.dim_a();
  const int db = psi.dim_b();
  const MatrixXcd proj = psi.amplitudes() * psi.amplitudes().adjoint();
  MatrixXcd out = MatrixXcd::Zero(da * db, da * db);
  for (const auto& kc : c.ops())
    for (const auto& kd : d.ops()) {
      const MatrixXcd k = kron(kc, kd);
      out += k * proj * k.adjoint();
    }
  const MatrixXcd m = psi.coefficient_matrix();
  const VectorXcd swapped = vectorize(m.transpose());
  return (out - swapped * swapped.adjoint()).cwiseAbs().maxCoeff();
}

UnitaryMixture rare_synthesis_quantum(const DensityMatrix& rho, const DensityMatrix& rho_prime) {
  if (rho.dim() != rho_prime.dim()) throw StructuralError("dimension mismatch: states differ in dimension");
  const auto sp = spectral(rho.matrix());
  const auto sq = spectral(rho_prime.matrix());
  VectorXd p = sp.values.cwiseMax(0.0);
  VectorXd q = sq.values.cwiseMax(0.0);
  p /= p.sum();
  q /= q.sum();
  if (!majorizes(q, p)) throw PreconditionError("spectrum of rho' does not majorize spectrum of rho");

  const auto channel = birkhoff_rare_synthesis(q, p);
  const auto& sys = *channel.system();
  UnitaryMixture out;
  for (const auto& e : channel.entries()) {
    const MatrixXcd perm = sys.group[static_cast<std::size_t>(e.group_index)].cast<Complex>();
    out.weights.push_back(e.weight);
    out.unitaries.push_back(sp.vectors * perm * sq.vectors.adjoint());
  }
  return out;
}

OneWayProtocol one_way_locc_from_rare(const PureBipartiteState& psi, const PureBipartiteState& target,
                                      const UnitaryMixture& rare) {
  if (psi.dim_a() != target.dim_a()) throw StructuralError("dimension mismatch: Alice's systems differ");
  const MatrixXcd x = psi.coefficient_matrix();
  const MatrixXcd xt = target.coefficient_matrix();
  const MatrixXcd rho = x * x.adjoint();
  const MatrixXcd rho_t = xt * xt.adjoint();
  const double pre = (rare.apply(rho_t) - rho).cwiseAbs().maxCoeff();
  if (pre > 1e-8)
    throw PreconditionError("RaRe mixture does not map the target marginal to the source marginal (residual " +
                            std::to_string(pre) + ")");

  // Steering: the ensemble sqrt(w_i) (U_i x I) target decomposes the
  // extension of rho, so B_i^T = X^+ M_i reproduces each member from psi.
  const MatrixXcd x_pinv = pseudo_inverse(x);
  const int db = psi.dim_b();
  const int db_out = target.dim_b();
  OneWayProtocol out;
  MatrixXcd completeness = MatrixXcd::Zero(db, db);
  for (std::size_t i = 0; i < rare.weights.size(); ++i) {
    if (rare.weights[i] <= 0.0) continue;
    const MatrixXcd mi = std::sqrt(rare.weights[i]) * rare.unitaries[i] * xt;
    MatrixXcd bi = (x_pinv * mi).transpose();
    completeness += bi.adjoint() * bi;
    out.bob_instrument.push_back(std::move(bi));
    out.alice_corrections.push_back(rare.unitaries[i].adjoint());
    out.outcome_probs.push_back(rare.weights[i]);
  }

  // Outside the support of psi's B marginal the instrument is completed by
  // zero-probability outcomes.
  const MatrixXcd deficit = MatrixXcd::Identity(db, db) - completeness;
  if (deficit.cwiseAbs().maxCoeff() > 1e-10) {
    const auto sp = spectral(0.5 * (deficit + deficit.adjoint()));
    for (Eigen::Index k = 0; k < sp.values.size(); ++k) {
      if (sp.values(k) <= 1e-12) continue;
      MatrixXcd bk = MatrixXcd::Zero(db_out, db);
      bk.row(0) = std::sqrt(sp.values(k)) * sp.vectors.col(k).adjoint();
      out.bob_instrument.push_back(std::move(bk));
      out.alice_corrections.push_back(MatrixXcd::Identity(psi.dim_a(), psi.dim_a()));
      out.outcome_probs.push_back(0.0);
    }
  }
  return out;
}

ProtocolCheck check_protocol(const OneWayProtocol& protocol, const PureBipartiteState& psi,
                             const PureBipartiteState& target) {
  ProtocolCheck chk;
  const int db = psi.dim_b();
  MatrixXcd s = MatrixXcd::Zero(db, db);
  const MatrixXcd x = psi.coefficient_matrix();
  for (std::size_t i = 0; i < protocol.bob_instrument.size(); ++i) {
    const auto& b = protocol.bob_instrument[i];
    const auto& a = protocol.alice_corrections[i];
    s += b.adjoint() * b;
    const VectorXcd v = vectorize(a * x * b.transpose());
    const double sqrt_p = std::sqrt(protocol.outcome_probs[i]);
    const Complex ov = target.amplitudes().dot(v);
    const Complex phase = std::abs(ov) > 0 ? ov / std::abs(ov) : Complex(1.0, 0.0);
    chk.overlap = std::max(chk.overlap, std::abs(std::abs(ov) - sqrt_p));
    chk.proportionality = std::max(chk.proportionality, (v - phase * sqrt_p * target.amplitudes()).norm());
  }
  chk.completeness = (s - MatrixXcd::Identity(db, db)).cwiseAbs().maxCoeff();
  return chk;
}

double entanglement_entropy(const VectorXcd& psi, int d_a, int d_b) {
  MatrixXcd m(d_a, d_b);
  for (int i = 0; i < d_a; ++i)
    for (int j = 0; j < d_b; ++j) m(i, j) = psi(i * d_b + j);
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  VectorXd p = svd.singularValues().array().square();
  const double total = p.sum();
  if (total <= 0.0) return 0.0;
  return shannon_bits(p / total);
}

ErasureCertificate catalytic_erasure_possible(const DensityMatrix& rho) {
  ErasureCertificate cert;
  cert.purity = rho.purity();
  cert.possible = std::abs(1.0 - cert.purity) <= 1e-9;
  cert.margin = std::max(0.0, 1.0 - cert.purity);
  return cert;
}

PureBipartiteState random_pure_state(CounterRng& rng, int d_a, int d_b) {
  return PureBipartiteState(d_a, d_b, random_unit_vector(rng, d_a * d_b));
}

}  // namespace entmix::quantum
