#include "entmix/gpt_core.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

namespace entmix {

namespace {

void require_shape(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw StructuralError("dimension mismatch in field '" + field + "': " + what);
}

std::string idx(const std::string& field, std::size_t i) {
  std::ostringstream os;
  os << field << '[' << i << ']';
  return os.str();
}

}  // namespace

bool ValidationReport::cites(const std::string& invariant) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.invariant == invariant; });
}

std::optional<std::vector<int>> vertex_permutation(const TheorySystem& sys, const Eigen::MatrixXd& g,
                                                   double tol) {
  const auto& verts = sys.pure_states;
  std::vector<int> perm(verts.size(), -1);
  std::vector<bool> hit(verts.size(), false);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    const Eigen::VectorXd image = g * verts[i];
    for (std::size_t j = 0; j < verts.size(); ++j) {
      if (!hit[j] && (image - verts[j]).cwiseAbs().maxCoeff() <= tol) {
        perm[i] = static_cast<int>(j);
        hit[j] = true;
        break;
      }
    }
    if (perm[i] < 0) return std::nullopt;
  }
  return perm;
}

std::optional<int> find_group_element(const TheorySystem& sys, const Eigen::MatrixXd& m, double tol) {
  for (std::size_t k = 0; k < sys.group.size(); ++k) {
    if ((sys.group[k] - m).cwiseAbs().maxCoeff() <= tol) return static_cast<int>(k);
  }
  return std::nullopt;
}

ValidationReport validate_system(const TheorySystem& sys, double tol) {
  const int d = sys.dim;
  require_shape(d > 0, "dim", "must be positive");
  require_shape(sys.unit_effect.size() == d, "unit_effect", "length differs from dim");
  for (std::size_t i = 0; i < sys.pure_states.size(); ++i)
    require_shape(sys.pure_states[i].size() == d, idx("pure_states", i), "length differs from dim");
  for (std::size_t i = 0; i < sys.extremal_effects.size(); ++i)
    require_shape(sys.extremal_effects[i].size() == d, idx("extremal_effects", i), "length differs from dim");
  for (std::size_t i = 0; i < sys.group.size(); ++i)
    require_shape(sys.group[i].rows() == d && sys.group[i].cols() == d, idx("group", i), "matrix is not dim x dim");
  require_shape(!sys.pure_states.empty(), "pure_states", "must be non-empty");

  ValidationReport report;
  auto add = [&](std::string inv, std::size_t i, double res, std::string detail) {
    report.violations.push_back({std::move(inv), static_cast<int>(i), res, std::move(detail)});
  };

  for (std::size_t i = 0; i < sys.pure_states.size(); ++i) {
    const double r = std::abs(sys.unit_effect.dot(sys.pure_states[i]) - 1.0);
    if (r > tol) add("state_normalization", i, r, "pure state does not have norm 1");
  }

  // Permutation signature of each element, used for closure lookups.
  std::vector<std::optional<std::vector<int>>> perms(sys.group.size());
  std::map<std::vector<int>, int> by_perm;
  for (std::size_t k = 0; k < sys.group.size(); ++k) {
    const auto& g = sys.group[k];
    const double ru = (sys.unit_effect * g - sys.unit_effect).cwiseAbs().maxCoeff();
    if (ru > tol) add("unit_effect_invariance", k, ru, "u * U != u");
    perms[k] = vertex_permutation(sys, g, tol);
    if (!perms[k]) {
      add("group_permutes_vertices", k, 0.0, "group element does not permute the pure states");
    } else {
      by_perm.emplace(*perms[k], static_cast<int>(k));
    }
  }

  auto lookup = [&](const Eigen::MatrixXd& m, const std::optional<std::vector<int>>& perm) -> bool {
    if (perm) {
      auto it = by_perm.find(*perm);
      if (it != by_perm.end() && (sys.group[it->second] - m).cwiseAbs().maxCoeff() <= tol) return true;
    }
    return find_group_element(sys, m, tol).has_value();
  };

  for (std::size_t a = 0; a < sys.group.size(); ++a) {
    const Eigen::MatrixXd inv = sys.group[a].fullPivLu().inverse();
    std::optional<std::vector<int>> inv_perm;
    if (perms[a]) {
      std::vector<int> p(perms[a]->size());
      for (std::size_t i = 0; i < p.size(); ++i) p[(*perms[a])[i]] = static_cast<int>(i);
      inv_perm = p;
    }
    if (!lookup(inv, inv_perm)) add("group_inverse", a, 0.0, "inverse is not in the group");
    for (std::size_t b = 0; b < sys.group.size(); ++b) {
      std::optional<std::vector<int>> prod_perm;
      if (perms[a] && perms[b]) {
        std::vector<int> p(perms[b]->size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = (*perms[a])[(*perms[b])[i]];
        prod_perm = p;
      }
      if (!lookup(sys.group[a] * sys.group[b], prod_perm)) {
        add("group_closure", a * sys.group.size() + b, 0.0,
            "product of elements " + std::to_string(a) + " and " + std::to_string(b) + " is not in the group");
      }
    }
  }

  for (std::size_t e = 0; e < sys.extremal_effects.size(); ++e) {
    for (const auto& v : sys.pure_states) {
      const double val = sys.extremal_effects[e].dot(v);
      const double r = std::max(-val, val - 1.0);
      if (r > tol) {
        add("effect_range", e, r, "effect leaves [0,1] on a pure state");
        break;
      }
    }
  }
  return report;
}

SystemPtr make_classical(int n) {
  if (n < 1) throw PreconditionError("classical system needs n >= 1");
  if (n > 6) throw CapacityError("classical system limited to n <= 6 (factorial group size)");
  auto sys = std::make_shared<TheorySystem>();
  sys->name = "classical:" + std::to_string(n);
  sys->dim = n;
  sys->unit_effect = Eigen::RowVectorXd::Ones(n);
  for (int i = 0; i < n; ++i) {
    sys->pure_states.push_back(Eigen::VectorXd::Unit(n, i));
    sys->extremal_effects.push_back(Eigen::RowVectorXd::Unit(n, i));
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, perm[i]) = 1.0;
    sys->group.push_back(std::move(m));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sys;
}

SystemPtr make_square_bit() {
  auto sys = std::make_shared<TheorySystem>();
  sys->name = "square";
  sys->dim = 3;
  sys->unit_effect = Eigen::RowVector3d(0, 0, 1);
  for (auto [x, y] : {std::pair{1, 1}, {-1, 1}, {-1, -1}, {1, -1}})
    sys->pure_states.push_back(Eigen::Vector3d(x, y, 1));

  // Facet effects (1 +- x)/2 and (1 +- y)/2, then zero and unit.
  sys->extremal_effects = {Eigen::RowVector3d(0.5, 0, 0.5), Eigen::RowVector3d(-0.5, 0, 0.5),
                           Eigen::RowVector3d(0, 0.5, 0.5), Eigen::RowVector3d(0, -0.5, 0.5),
                           Eigen::RowVector3d(0, 0, 0), Eigen::RowVector3d(0, 0, 1)};

  const int d4[8][4] = {{1, 0, 0, 1},  {0, -1, 1, 0}, {-1, 0, 0, -1}, {0, 1, -1, 0},
                        {1, 0, 0, -1}, {-1, 0, 0, 1}, {0, 1, 1, 0},   {0, -1, -1, 0}};
  for (const auto& r : d4) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(0, 0) = r[0];
    m(0, 1) = r[1];
    m(1, 0) = r[2];
    m(1, 1) = r[3];
    sys->group.push_back(m);
  }
  return sys;
}

GptState::GptState(SystemPtr system, Eigen::VectorXd vec) : system_(std::move(system)), vec_(std::move(vec)) {
  if (!system_) throw StructuralError("state has no system");
  if (vec_.size() != system_->dim) throw StructuralError("dimension mismatch in field 'vec': state length differs from dim");
}

Effect::Effect(SystemPtr system, Eigen::RowVectorXd covec) : system_(std::move(system)), covec_(std::move(covec)) {
  if (!system_) throw StructuralError("effect has no system");
  if (covec_.size() != system_->dim) throw StructuralError("dimension mismatch in field 'covec': effect length differs from dim");
}

Measurement::Measurement(std::vector<Effect> effects, double tol) : effects_(std::move(effects)) {
  if (effects_.empty()) throw PreconditionError("measurement needs at least one effect");
  const auto& sys = *effects_.front().system();
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(sys.dim);
  for (const auto& e : effects_) {
    if (e.system()->dim != sys.dim) throw StructuralError("measurement effects belong to different systems");
    sum += e.covec();
  }
  if ((sum - sys.unit_effect).cwiseAbs().maxCoeff() > tol)
    throw PreconditionError("measurement effects do not sum to the unit effect");
}

std::vector<double> Measurement::outcome_probabilities(const GptState& state) const {
  std::vector<double> p;
  p.reserve(effects_.size());
  for (const auto& e : effects_) p.push_back(e(state));
  return p;
}

GptChannel::GptChannel(SystemPtr input, SystemPtr output, Eigen::MatrixXd matrix, double tol)
    : input_(std::move(input)), output_(std::move(output)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != output_->dim || matrix_.cols() != input_->dim)
    throw StructuralError("dimension mismatch in field 'matrix': channel matrix is not D_out x D_in");
  const double r = (output_->unit_effect * matrix_ - input_->unit_effect).cwiseAbs().maxCoeff();
  if (r > tol) throw PreconditionError("not a channel: u_out * C != u_in (residual " + std::to_string(r) + ")");
}

GptChannel GptChannel::identity(const SystemPtr& system) {
  return GptChannel(system, system, Eigen::MatrixXd::Identity(system->dim, system->dim));
}

Instrument::Instrument(SystemPtr input, SystemPtr output, std::vector<Eigen::MatrixXd> branches, double tol)
    : input_(std::move(input)), output_(std::move(output)), branches_(std::move(branches)) {
  if (branches_.empty()) throw PreconditionError("instrument needs at least one branch");
  for (const auto& b : branches_) {
    if (b.rows() != output_->dim || b.cols() != input_->dim)
      throw StructuralError("dimension mismatch in field 'branches': branch is not D_out x D_in");
    for (const auto& v : input_->pure_states) {
      const double n = output_->unit_effect.dot(b * v);
      if (n < -tol || n > 1.0 + tol) throw PreconditionError("instrument branch produces a norm outside [0,1]");
    }
  }
  (void)coarse_grained();  // validates the branch sum as a channel
}

GptChannel Instrument::coarse_grained() const {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(output_->dim, input_->dim);
  for (const auto& b : branches_) sum += b;
  return GptChannel(input_, output_, sum);
}

GptState apply_channel(const GptChannel& channel, const GptState& state) {
  if (state.system()->dim != channel.input()->dim)
    throw StructuralError("dimension mismatch: state does not match channel input");
  return GptState(channel.output(), channel.matrix() * state.vec());
}

GptState apply_group_element(int index, const GptState& state) {
  const auto& g = state.system()->group.at(static_cast<std::size_t>(index));
  return GptState(state.system(), g * state.vec());
}

}  // namespace entmix
