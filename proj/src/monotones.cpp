#include "entmix/monotones.hpp"

#include "entmix/mixedness.hpp"
#include "entmix/random.hpp"
#include "entmix/simplex.hpp"

#include <cmath>
#include <map>
#include <memory>

namespace entmix {

namespace {

struct Outcome {
  int effect = 0;
  int numerator = 0;
};

std::vector<Eigen::RowVectorXd> nontrivial_effects(const TheorySystem& sys) {
  std::vector<Eigen::RowVectorXd> out;
  for (const auto& e : sys.extremal_effects) {
    if (e.cwiseAbs().maxCoeff() <= kTol) continue;
    if (sys.dim > 1 && (e - sys.unit_effect).cwiseAbs().maxCoeff() <= kTol) continue;
    const bool dup = std::any_of(out.begin(), out.end(),
                                 [&](const Eigen::RowVectorXd& o) { return (o - e).cwiseAbs().maxCoeff() <= kTol; });
    if (!dup) out.push_back(e);
  }
  return out;
}

void partitions(int n, int max_part, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(current);
    return;
  }
  for (int part = std::min(n, max_part); part >= 1; --part) {
    current.push_back(part);
    partitions(n - part, part, current, out);
    current.pop_back();
  }
}

const std::vector<std::vector<int>>& partitions_of(int n) {
  static const auto table = [] {
    std::vector<std::vector<std::vector<int>>> t;
    for (int k = 0; k <= 16; ++k) {
      std::vector<std::vector<int>> out;
      std::vector<int> cur;
      partitions(k, k, cur, out);
      t.push_back(std::move(out));
    }
    return t;
  }();
  return table.at(static_cast<std::size_t>(n));
}

// Visits every enumerated measurement as a list of outcomes. Returns false
// when the bound stopped the enumeration early.
template <typename Visit>
bool for_each_measurement(const TheorySystem& sys, const std::vector<Eigen::RowVectorXd>& effects,
                          const MeasurementEnumeration& strategy, Visit&& visit) {
  const int den = strategy.max_denominator;
  if (den < 1 || den > 16) throw PreconditionError("max_denominator must lie in [1, 16]");
  const int k = static_cast<int>(effects.size());
  const Eigen::Index nv = static_cast<Eigen::Index>(sys.pure_states.size());

  Eigen::MatrixXd on_vertices(k, nv);
  for (int j = 0; j < k; ++j)
    for (Eigen::Index v = 0; v < nv; ++v) on_vertices(j, v) = effects[static_cast<std::size_t>(j)].dot(sys.pure_states[static_cast<std::size_t>(v)]);
  std::vector<int> bound(static_cast<std::size_t>(k), 0);
  for (int j = 0; j < k; ++j) {
    const double top = on_vertices.row(j).maxCoeff();
    bound[static_cast<std::size_t>(j)] = top > kTol ? std::min(4 * den, static_cast<int>(std::floor(den / top + 1e-9))) : 0;
  }

  std::size_t count = 0;
  std::vector<int> mult(static_cast<std::size_t>(k), 0);
  Eigen::RowVectorXd target = den * sys.unit_effect;
  bool stopped = false;

  // Expands a multiplicity vector into every split of each effect.
  auto expand = [&](const std::vector<int>& m) {
    std::vector<int> used;
    for (int j = 0; j < k; ++j)
      if (m[static_cast<std::size_t>(j)] > 0) used.push_back(j);
    std::vector<std::size_t> choice(used.size(), 0);
    std::vector<Outcome> outcomes;
    while (true) {
      outcomes.clear();
      for (std::size_t u = 0; u < used.size(); ++u) {
        const auto& parts = partitions_of(m[static_cast<std::size_t>(used[u])])[choice[u]];
        for (int part : parts) outcomes.push_back({used[u], part});
      }
      if (count >= strategy.max_measurements) {
        stopped = true;
        return;
      }
      ++count;
      visit(outcomes);
      std::size_t u = 0;
      for (; u < used.size(); ++u) {
        if (++choice[u] < partitions_of(m[static_cast<std::size_t>(used[u])]).size()) break;
        choice[u] = 0;
      }
      if (u == used.size()) return;
    }
  };

  Eigen::VectorXd load = Eigen::VectorXd::Zero(nv);
  auto dfs = [&](auto&& self, int j) -> void {
    if (stopped) return;
    if (j == k) {
      Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(sys.dim);
      for (int i = 0; i < k; ++i) sum += mult[static_cast<std::size_t>(i)] * effects[static_cast<std::size_t>(i)];
      if ((sum - target).cwiseAbs().maxCoeff() <= 1e-9 * den) expand(mult);
      return;
    }
    for (int c = 0; c <= bound[static_cast<std::size_t>(j)]; ++c) {
      const Eigen::VectorXd next = load + c * on_vertices.row(j).transpose();
      if (next.maxCoeff() > den + 1e-9) break;
      mult[static_cast<std::size_t>(j)] = c;
      const Eigen::VectorXd saved = load;
      load = next;
      self(self, j + 1);
      load = saved;
      if (stopped) return;
    }
    mult[static_cast<std::size_t>(j)] = 0;
  };
  dfs(dfs, 0);
  return !stopped;
}

std::vector<Eigen::RowVectorXd> outcome_effects(const std::vector<Outcome>& outcomes,
                                                const std::vector<Eigen::RowVectorXd>& effects, int den) {
  std::vector<Eigen::RowVectorXd> out;
  for (const auto& o : outcomes)
    out.push_back((static_cast<double>(o.numerator) / den) * effects[static_cast<std::size_t>(o.effect)]);
  return out;
}

// sup and inf of a(delta) over 0 <= a(v) <= 1.
std::pair<std::pair<double, Eigen::RowVectorXd>, std::pair<double, Eigen::RowVectorXd>> effect_range(
    const TheorySystem& sys, const Eigen::VectorXd& delta) {
  const Eigen::Index d = sys.dim;
  const Eigen::Index nv = static_cast<Eigen::Index>(sys.pure_states.size());
  // Columns: a+ (d), a- (d), upper slack (nv), lower surplus (nv).
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * nv, 2 * d + 2 * nv);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * nv);
  for (Eigen::Index v = 0; v < nv; ++v) {
    const Eigen::RowVectorXd row = sys.pure_states[static_cast<std::size_t>(v)].transpose();
    a.block(v, 0, 1, d) = row;
    a.block(v, d, 1, d) = -row;
    a(v, 2 * d + v) = 1.0;
    b(v) = 1.0;
    a.block(nv + v, 0, 1, d) = row;
    a.block(nv + v, d, 1, d) = -row;
    a(nv + v, 2 * d + nv + v) = -1.0;
  }
  auto solve = [&](double sign) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(2 * d + 2 * nv);
    c.head(d) = sign * delta;
    c.segment(d, d) = -sign * delta;
    const auto res = solve_lp<double>(a, b, c);
    if (res.status != LpStatus::optimal) throw NumericalError("effect polytope LP did not reach an optimum");
    Eigen::RowVectorXd eff = (res.x.head(d) - res.x.segment(d, d)).transpose();
    return std::pair{eff.dot(delta), eff};
  };
  return {solve(-1.0), solve(1.0)};
}

}  // namespace

ConvexScalarFn ConvexScalarFn::xlogx() {
  return ConvexScalarFn(Tag::xlogx, "xlogx", [](double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }, true);
}

ConvexScalarFn ConvexScalarFn::square() {
  return ConvexScalarFn(Tag::square, "square", [](double x) { return x * x; }, true);
}

ConvexScalarFn ConvexScalarFn::custom(std::string name, std::function<double(double)> fn, bool convex) {
  return ConvexScalarFn(Tag::custom, std::move(name), std::move(fn), convex);
}

bool ConvexScalarFn::check_convexity(int trials, std::uint64_t seed) const {
  CounterRng rng(seed, 0xc0);
  for (int t = 0; t < trials; ++t) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    const double lam = rng.uniform();
    const double mid = fn_(lam * x + (1 - lam) * y);
    if (mid > lam * fn_(x) + (1 - lam) * fn_(y) + 1e-12) return false;
  }
  return true;
}

std::vector<std::vector<Eigen::RowVectorXd>> enumerate_pure_measurements(const TheorySystem& sys,
                                                                         const MeasurementEnumeration& strategy) {
  const auto effects = nontrivial_effects(sys);
  std::vector<std::vector<Eigen::RowVectorXd>> out;
  const bool complete = for_each_measurement(sys, effects, strategy, [&](const std::vector<Outcome>& o) {
    out.push_back(outcome_effects(o, effects, strategy.max_denominator));
  });
  if (!complete) throw CapacityError("measurement enumeration exceeded " + std::to_string(strategy.max_measurements));
  return out;
}

MonotoneReport f_purity(const GptState& rho, const ConvexScalarFn& f, const MeasurementEnumeration& strategy) {
  if (!rho.normalized()) throw PreconditionError("f-purity needs a normalized state");
  const auto& sys = *rho.system();
  const auto effects = nontrivial_effects(sys);
  if (effects.empty()) throw PreconditionError("system supplies no nontrivial extremal effects");

  std::vector<double> values;
  for (const auto& e : effects) values.push_back(e.dot(rho.vec()));
  const double den = strategy.max_denominator;

  MonotoneReport report;
  report.name = f.name() + "-purity";
  report.value = -std::numeric_limits<double>::infinity();
  std::vector<Outcome> best;
  const bool complete = for_each_measurement(sys, effects, strategy, [&](const std::vector<Outcome>& outcomes) {
    double total = 0.0;
    for (const auto& o : outcomes) total += f(o.numerator / den * values[static_cast<std::size_t>(o.effect)]);
    if (total > report.value) {
      report.value = total;
      best = outcomes;
    }
  });
  if (best.empty() && complete) throw PreconditionError("no measurement can be assembled from the extremal effects");
  report.witness = outcome_effects(best, effects, strategy.max_denominator);
  if (!complete) {
    report.lower_bound = true;
    throw EnumerationBoundError("measurement enumeration bound reached; value is a lower bound", report);
  }
  return report;
}

MonotoneReport measurement_entropy(const GptState& rho, const MeasurementEnumeration& strategy) {
  auto report = f_purity(rho, ConvexScalarFn::xlogx(), strategy);
  report.name = "measurement-entropy";
  report.value = -report.value;
  return report;
}

MonotoneReport measurement_entropy(const quantum::DensityMatrix& rho) {
  if (std::abs(rho.trace() - 1.0) > 1e-10) throw PreconditionError("measurement entropy needs a normalized state");
  const auto sp = quantum::spectral(rho.matrix());
  MonotoneReport report;
  report.name = "measurement-entropy";
  report.value = quantum::shannon_bits(sp.values.cwiseMax(0.0));
  report.quantum_witness = sp.vectors;
  return report;
}

MonotoneReport op_norm_report(const GptState& rho, const GptState& chi) {
  const auto& sys = *rho.system();
  const Eigen::VectorXd delta = rho.vec() - chi.vec();
  const auto [sup, inf] = effect_range(sys, delta);
  MonotoneReport report;
  report.name = "op-norm";
  report.value = 0.5 * (sup.first - inf.first);
  report.witness = {sup.second, inf.second};
  return report;
}

double op_norm_distance(const GptState& rho) { return op_norm_report(rho, invariant_state(rho.system())).value; }

Eigen::MatrixXd invariant_quadratic_form(const TheorySystem& sys) {
  if (sys.group.empty()) throw UnsupportedError("system has no reversible group");
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(sys.dim, sys.dim);
  for (const auto& u : sys.group) g += u.transpose() * u;
  g /= static_cast<double>(sys.group.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().maxCoeff())
    throw UnsupportedError("averaged quadratic form is degenerate: no orthogonal group representation");
  return g;
}

double purity_2norm(const GptState& rho) {
  const Eigen::MatrixXd g = invariant_quadratic_form(*rho.system());
  return rho.vec().dot(g * rho.vec());
}

double purity_2norm(const quantum::DensityMatrix& rho) { return rho.purity(); }

SchurReport schur_convexity_check(const PurityFunction& monotone, const SystemPtr& system, int trials,
                                  std::uint64_t seed, double tol) {
  const auto& sys = *system;
  CounterRng rng(seed, 0x5c);
  SchurReport report;
  report.trials = trials;
  const int nv = static_cast<int>(sys.pure_states.size());
  const int ng = static_cast<int>(sys.group.size());
  for (int t = 0; t < trials; ++t) {
    CounterRng local = rng.fork(static_cast<std::uint64_t>(t));
    // Cubed Dirichlet weights spread the samples from near-pure to near-mixed.
    auto w = random_simplex_point(local, nv);
    double total = 0.0;
    for (auto& x : w) {
      x = x * x * x;
      total += x;
    }
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(sys.dim);
    for (int i = 0; i < nv; ++i) rho += (w[static_cast<std::size_t>(i)] / total) * sys.pure_states[static_cast<std::size_t>(i)];

    const int terms = 1 + local.uniform_int(3);
    const auto mix = random_simplex_point(local, terms);
    Eigen::VectorXd sigma = Eigen::VectorXd::Zero(sys.dim);
    for (int i = 0; i < terms; ++i) sigma += mix[static_cast<std::size_t>(i)] * (sys.group[static_cast<std::size_t>(local.uniform_int(ng))] * rho);

    const double pr = monotone(GptState(system, rho));
    const double ps = monotone(GptState(system, sigma));
    if (ps > pr + tol) report.violations.push_back({rho, sigma, pr, ps});
  }
  return report;
}

PurityFunction builtin_monotone(const std::string& name) {
  if (name == "x2-purity")
    return [](const GptState& s) { return f_purity(s, ConvexScalarFn::square()).value; };
  if (name == "xlogx-purity")
    return [](const GptState& s) { return f_purity(s, ConvexScalarFn::xlogx()).value; };
  if (name == "neg-entropy") return [](const GptState& s) { return -measurement_entropy(s).value; };
  if (name == "purity-2norm") return [](const GptState& s) { return purity_2norm(s); };
  if (name == "op-norm") {
    auto cache = std::make_shared<std::map<const TheorySystem*, GptState>>();
    return [cache](const GptState& s) {
      auto it = cache->find(s.system().get());
      if (it == cache->end()) it = cache->emplace(s.system().get(), invariant_state(s.system())).first;
      return op_norm_report(s, it->second).value;
    };
  }
  throw PreconditionError("unknown monotone '" + name + "'");
}

}  // namespace entmix
