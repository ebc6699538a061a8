#include "entmix/mixedness.hpp"

#include "entmix/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace entmix {

namespace {

constexpr double kWitnessTol = 1e-8;
constexpr double kScaleLimit = 1e12;

bool same_system(const GptState& a, const GptState& b) {
  return a.system() == b.system() || (a.system()->name == b.system()->name && a.system()->dim == b.system()->dim);
}

void require_normalized(const GptState& s, const char* which) {
  if (!s.normalized()) throw PreconditionError(std::string(which) + " is not normalized");
}

void require_probability(const Eigen::VectorXd& p, const char* which) {
  if ((p.array() < -1e-12).any() || std::abs(p.sum() - 1.0) > 1e-10)
    throw PreconditionError(std::string(which) + " is not a normalized probability vector");
}

std::vector<int> sorted_order(const Eigen::VectorXd& v) {
  std::vector<int> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v(a) > v(b); });
  return idx;
}

int lexicographic_rank(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  int rank = 0;
  int factorial = 1;
  for (int i = n - 1; i >= 0; --i) {
    int smaller = 0;
    for (int j = i + 1; j < n; ++j)
      if (perm[static_cast<std::size_t>(j)] < perm[static_cast<std::size_t>(i)]) ++smaller;
    rank += smaller * factorial;
    factorial *= (n - i);
  }
  return rank;
}

}  // namespace

RaReChannel::RaReChannel(SystemPtr system, std::vector<RaReEntry> entries, double tol)
    : system_(std::move(system)), entries_(std::move(entries)) {
  double total = 0.0;
  for (const auto& e : entries_) {
    if (e.weight < 0.0) throw PreconditionError("RaRe weight is negative");
    if (e.group_index < 0 || e.group_index >= static_cast<int>(system_->group.size()))
      throw StructuralError("RaRe group index out of range");
    total += e.weight;
  }
  if (std::abs(total - 1.0) > tol) throw PreconditionError("RaRe weights do not sum to 1");
}

Eigen::MatrixXd RaReChannel::matrix() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(system_->dim, system_->dim);
  for (const auto& e : entries_) m += e.weight * system_->group[static_cast<std::size_t>(e.group_index)];
  return m;
}

GptState RaReChannel::apply(const GptState& state) const {
  if (state.system()->dim != system_->dim) throw StructuralError("dimension mismatch: state does not match RaRe channel");
  return GptState(state.system(), matrix() * state.vec());
}

FeasibilityCertificate feasible_convex_combination(std::span<const Eigen::VectorXd> generators,
                                                   const Eigen::VectorXd& target) {
  if (generators.empty()) throw PreconditionError("generator list is empty");
  const Eigen::Index d = target.size();
  const Eigen::Index n = static_cast<Eigen::Index>(generators.size());

  Eigen::MatrixXd a(d + 1, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (generators[static_cast<std::size_t>(j)].size() != d)
      throw StructuralError("dimension mismatch: generator and target lengths differ");
    a.col(j).head(d) = generators[static_cast<std::size_t>(j)];
    a(d, j) = 1.0;
  }
  Eigen::VectorXd b(d + 1);
  b.head(d) = target;
  b(d) = 1.0;

  if (!a.allFinite() || !b.allFinite()) throw NumericalError("non-finite entries in feasibility problem");
  const double big = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
  double small = big;
  for (double v : a.reshaped()) {
    if (v != 0.0) small = std::min(small, std::abs(v));
  }
  if (big / small > kScaleLimit)
    throw NumericalError("feasibility problem is badly scaled (entry magnitude ratio " + std::to_string(big / small) + ")");

  SimplexOptions<double> opts;
  opts.phase1_only = true;
  opts.feasibility_tol = 1e-9 * std::max(1.0, big);
  const auto lp = solve_lp<double>(a, b, Eigen::VectorXd::Zero(n), opts);

  FeasibilityCertificate cert;
  if (lp.status != LpStatus::optimal) {
    cert.feasible = false;
    cert.residual = lp.infeasibility;
    return cert;
  }
  cert.feasible = true;
  cert.weights = lp.x.cwiseMax(0.0);
  cert.residual = (a * cert.weights - b).cwiseAbs().maxCoeff();
  if (cert.residual > kWitnessTol)
    throw NumericalError("feasible verdict but witness residual " + std::to_string(cert.residual) + " exceeds 1e-8");
  return cert;
}

FeasibilityCertificate more_mixed(const GptState& rho, const GptState& sigma) {
  if (!same_system(rho, sigma)) throw PreconditionError("states belong to different systems");
  require_normalized(rho, "rho");
  require_normalized(sigma, "sigma");
  const auto& group = rho.system()->group;
  if (group.empty()) throw PreconditionError("system has no reversible group");
  std::vector<Eigen::VectorXd> orbit;
  orbit.reserve(group.size());
  for (const auto& g : group) orbit.push_back(g * rho.vec());
  return feasible_convex_combination(orbit, sigma.vec());
}

EqualMixedness equally_mixed(const GptState& rho, const GptState& sigma) {
  EqualMixedness out;
  out.equal = more_mixed(rho, sigma).feasible && more_mixed(sigma, rho).feasible;
  if (!out.equal) return out;
  const auto& group = rho.system()->group;
  for (std::size_t k = 0; k < group.size(); ++k) {
    if ((group[k] * rho.vec() - sigma.vec()).cwiseAbs().maxCoeff() <= kTol) {
      out.witness = static_cast<int>(k);
      break;
    }
  }
  return out;
}

GptState invariant_state(const SystemPtr& system) {
  const auto& sys = *system;
  if (sys.group.empty()) throw PreconditionError("system has no reversible group");
  const double inv_order = 1.0 / static_cast<double>(sys.group.size());

  auto average = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(sys.dim);
    for (const auto& g : sys.group) acc += g * v;
    return Eigen::VectorXd(acc * inv_order);
  };

  const Eigen::VectorXd chi = average(sys.pure_states.front());
  for (std::size_t i = 1; i < sys.pure_states.size(); ++i) {
    const double gap = (average(sys.pure_states[i]) - chi).cwiseAbs().maxCoeff();
    if (gap > kTol)
      throw UnsupportedError("group average depends on the seed pure state (pure state " + std::to_string(i) +
                             ", gap " + std::to_string(gap) + "): no unique invariant state");
  }
  for (std::size_t k = 0; k < sys.group.size(); ++k) {
    if ((sys.group[k] * chi - chi).cwiseAbs().maxCoeff() > kTol)
      throw UnsupportedError("group average is not invariant under element " + std::to_string(k));
  }
  GptState state(system, chi);
  for (const auto& v : sys.pure_states) {
    if (!more_mixed(GptState(system, v), state).feasible)
      throw UnsupportedError("invariant state is not the maximum of the mixedness preorder");
  }
  return state;
}

std::vector<Eigen::VectorXd> orbit_hull(const GptState& rho) {
  std::vector<Eigen::VectorXd> orbit;
  for (const auto& g : rho.system()->group) {
    Eigen::VectorXd image = g * rho.vec();
    const bool seen = std::any_of(orbit.begin(), orbit.end(), [&](const Eigen::VectorXd& o) {
      return (o - image).cwiseAbs().maxCoeff() <= kTol;
    });
    if (!seen) orbit.push_back(std::move(image));
  }
  if (orbit.size() <= 1) return orbit;

  std::vector<Eigen::VectorXd> hull;
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    std::vector<Eigen::VectorXd> others;
    for (std::size_t j = 0; j < orbit.size(); ++j)
      if (j != i) others.push_back(orbit[j]);
    if (!feasible_convex_combination(others, orbit[i]).feasible) hull.push_back(orbit[i]);
  }
  return hull;
}

bool majorizes(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double tol) {
  if (p.size() != q.size()) throw StructuralError("dimension mismatch: majorization needs equal lengths");
  require_probability(p, "p");
  require_probability(q, "q");
  const auto sp = sorted_order(p);
  const auto sq = sorted_order(q);
  double ps = 0.0;
  double qs = 0.0;
  for (std::size_t k = 0; k < sp.size(); ++k) {
    ps += p(sp[k]);
    qs += q(sq[k]);
    if (ps < qs - tol) return false;
  }
  return true;
}

Eigen::MatrixXd t_transform_matrix(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (!majorizes(p, q)) throw PreconditionError("p does not majorize q");
  const Eigen::Index n = p.size();
  const auto sp = sorted_order(p);
  const auto sq = sorted_order(q);
  Eigen::VectorXd x(n);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = p(sp[static_cast<std::size_t>(i)]);
    y(i) = q(sq[static_cast<std::size_t>(i)]);
  }

  constexpr double eps = 1e-14;
  Eigen::MatrixXd ds = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index step = 0; step < 2 * n; ++step) {
    Eigen::Index j = -1;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      if (x(i) > y(i) + eps) {
        j = i;
        break;
      }
    }
    if (j < 0) break;
    Eigen::Index k = -1;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      if (x(i) < y(i) - eps) {
        k = i;
        break;
      }
    }
    if (k < 0) break;
    const double delta = std::min(x(j) - y(j), y(k) - x(k));
    const double lambda = 1.0 - delta / (x(j) - x(k));
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(n, n);
    t(j, j) = lambda;
    t(k, k) = lambda;
    t(j, k) = 1.0 - lambda;
    t(k, j) = 1.0 - lambda;
    x = t * x;
    ds = t * ds;
  }

  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(sq[static_cast<std::size_t>(i)], sp[static_cast<std::size_t>(j)]) = ds(i, j);
  return d;
}

std::vector<BirkhoffTerm> birkhoff_decompose(const Eigen::MatrixXd& doubly_stochastic, double tol) {
  const int n = static_cast<int>(doubly_stochastic.rows());
  if (n > 8) throw CapacityError("Birkhoff decomposition by enumeration limited to n <= 8");
  Eigen::MatrixXd rem = doubly_stochastic;
  std::vector<BirkhoffTerm> terms;
  std::vector<int> perm(static_cast<std::size_t>(n));

  while (rem.sum() > tol * n) {
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    std::vector<int> best_perm;
    do {
      double bottleneck = 1e300;
      for (int i = 0; i < n && bottleneck > best; ++i) bottleneck = std::min(bottleneck, rem(i, perm[static_cast<std::size_t>(i)]));
      if (bottleneck > tol && bottleneck > best) {
        best = bottleneck;
        best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best_perm.empty()) break;
    for (int i = 0; i < n; ++i) rem(i, best_perm[static_cast<std::size_t>(i)]) -= best;
    terms.push_back({best, best_perm});
  }
  return terms;
}

std::vector<int> permutation_of(const TheorySystem& classical, int index) {
  const auto& m = classical.group.at(static_cast<std::size_t>(index));
  std::vector<int> perm(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::Index j = 0;
    m.row(i).maxCoeff(&j);
    perm[static_cast<std::size_t>(i)] = static_cast<int>(j);
  }
  return perm;
}

RaReChannel birkhoff_rare_synthesis(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) throw StructuralError("dimension mismatch: p and q lengths differ");
  const int n = static_cast<int>(p.size());
  if (n > 6) throw CapacityError("Birkhoff synthesis limited to n <= 6");
  if (!majorizes(p, q)) throw PreconditionError("p does not majorize q: no RaRe channel maps p to q");

  const auto terms = birkhoff_decompose(t_transform_matrix(p, q));
  auto system = make_classical(n);
  std::vector<RaReEntry> entries;
  double total = 0.0;
  for (const auto& t : terms) total += t.weight;
  for (const auto& t : terms) entries.push_back({t.weight / total, lexicographic_rank(t.permutation)});
  return RaReChannel(system, std::move(entries));
}

}  // namespace entmix
