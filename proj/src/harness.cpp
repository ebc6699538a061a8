#include "entmix/harness.hpp"

#include "entmix/mixedness.hpp"
#include "entmix/monotones.hpp"
#include "entmix/quantum.hpp"
#include "entmix/random.hpp"
#include "entmix/serialize.hpp"

#include <chrono>
#include <functional>
#include <sstream>

namespace entmix {

using nlohmann::json;
namespace q = quantum;

void TrialConfig::validate() const {
  if (trials < 1) throw PreconditionError("trial count must be at least 1");
  if (!(witness_tol > 0.0) || !(protocol_tol > 0.0)) throw PreconditionError("tolerances must be positive");
  if (dim < 0) throw PreconditionError("dimension must be nonnegative");
  if (max_counterexamples < 1) throw PreconditionError("counterexample budget must be at least 1");
}

json TrialConfig::to_json() const {
  return {{"seed", seed},
          {"dim", dim},
          {"trials", trials},
          {"witness_tol", witness_tol},
          {"protocol_tol", protocol_tol},
          {"max_counterexamples", max_counterexamples}};
}

json SuiteReport::to_json(bool include_wall_time) const {
  json out = {{"suite", suite},
              {"config", config.to_json()},
              {"trials_run", trials_run},
              {"agreements", agreements},
              {"counterexamples", counterexamples},
              {"summary", summary},
              {"passed", passed()}};
  if (include_wall_time) out["wall_seconds"] = round12(wall_seconds);
  return out;
}

std::string SuiteReport::csv_header() { return "suite,seed,dim,trials_run,agreements,counterexamples,wall_seconds"; }

std::string SuiteReport::csv_row() const {
  std::ostringstream os;
  os << suite << ',' << config.seed << ',' << config.dim << ',' << trials_run << ',' << agreements << ','
     << counterexamples.size() << ',' << round12(wall_seconds);
  return os.str();
}

namespace {

struct TrialOutcome {
  bool ok = true;
  json verdict = json::object();
};

struct Tolerances {
  double witness = 1e-9;
  double protocol = 1e-8;
};

json tolerances_json(const Tolerances& t) { return {{"witness_tol", t.witness}, {"protocol_tol", t.protocol}}; }

Tolerances tolerances_from(const json& j) {
  return {j.at("witness_tol").get<double>(), j.at("protocol_tol").get<double>()};
}

// Inputs are stored at full precision so a replay sees the same numbers.
json exact_vector(const Eigen::VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

json exact_vector(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json exact_matrix(const Eigen::MatrixXcd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(exact_vector(Eigen::VectorXcd(m.row(r).transpose())));
  return out;
}

json exact_state(const q::PureBipartiteState& s) {
  return {{"d_a", s.dim_a()}, {"d_b", s.dim_b()}, {"amplitudes", exact_vector(s.amplitudes())}};
}

q::PureBipartiteState state_from(const json& j) {
  return q::PureBipartiteState(j.at("d_a").get<int>(), j.at("d_b").get<int>(),
                               complex_vector_from_json(j.at("amplitudes"), "amplitudes"));
}

double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void track_max(json& summary, const char* key, double value) {
  const double current = summary.contains(key) ? summary[key].get<double>() : 0.0;
  summary[key] = std::max(current, value);
}

// ---- duality -------------------------------------------------------------

TrialOutcome duality_check(const q::PureBipartiteState& psi, const q::PureBipartiteState& target,
                           const Tolerances& tol) {
  TrialOutcome out;
  const auto rho = q::marginals(psi).first;
  const auto rho_prime = q::marginals(target).first;
  const Eigen::VectorXd p = q::spectral(rho.matrix()).values.cwiseMax(0.0);
  const Eigen::VectorXd p_prime = q::spectral(rho_prime.matrix()).values.cwiseMax(0.0);

  const bool convertible = q::nielsen_convertible(psi, target);
  const bool more_mixed_marginal = majorizes(p_prime / p_prime.sum(), p / p.sum());
  out.verdict["nielsen_convertible"] = convertible;
  out.verdict["marginal_more_mixed"] = more_mixed_marginal;
  if (convertible != more_mixed_marginal) {
    out.ok = false;
    return out;
  }
  if (!convertible) return out;

  const auto rare = q::rare_synthesis_quantum(rho, rho_prime);
  const double rare_residual = max_abs(rare.apply(rho_prime.matrix()) - rho.matrix());
  const auto protocol = q::one_way_locc_from_rare(psi, target, rare);
  const auto check = q::check_protocol(protocol, psi, target);
  out.verdict["rare_residual"] = rare_residual;
  out.verdict["protocol_completeness"] = check.completeness;
  out.verdict["protocol_proportionality"] = check.proportionality;
  out.verdict["rare_terms"] = rare.weights.size();
  out.ok = rare_residual <= tol.witness && check.completeness <= tol.protocol && check.proportionality <= tol.protocol;
  return out;
}

std::pair<q::PureBipartiteState, q::PureBipartiteState> sample_duality_pair(CounterRng& rng, int d, int trial) {
  auto target = q::random_pure_state(rng, d, d);
  if (trial % 10 == 9) return {target, target};
  if (trial % 2 == 0) return {q::random_pure_state(rng, d, d), target};

  // Degrade the target's marginal by a random unitary mixture, purify, and
  // hide the construction behind random local unitaries.
  const auto rho_prime = q::marginals(target).first;
  const int terms = 1 + rng.uniform_int(3);
  const auto w = random_simplex_point(rng, terms);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (int i = 0; i < terms; ++i) {
    const Eigen::MatrixXcd u = random_unitary(rng, d);
    rho += w[static_cast<std::size_t>(i)] * u * rho_prime.matrix() * u.adjoint();
  }
  rho = 0.5 * (rho + rho.adjoint());
  const auto purified = q::purify(q::DensityMatrix(rho));
  const Eigen::MatrixXcd local = q::kron(random_unitary(rng, d), random_unitary(rng, d));
  Eigen::VectorXcd amps = local * purified.amplitudes();
  return {q::PureBipartiteState(d, d, amps / amps.norm()), target};
}

// ---- classical agreement ------------------------------------------------

TrialOutcome classical_check(const Eigen::VectorXd& p, const Eigen::VectorXd& r, const Tolerances& tol) {
  TrialOutcome out;
  const int n = static_cast<int>(p.size());
  const auto sys = make_classical(n);
  const GptState sp(sys, p), sr(sys, r);
  double worst = 0.0;
  bool ok = true;
  auto direction = [&](const GptState& from, const GptState& to, const char* key) {
    const auto cert = more_mixed(from, to);
    const bool maj = majorizes(from.vec(), to.vec());
    out.verdict[std::string(key) + "_lp"] = cert.feasible;
    out.verdict[std::string(key) + "_partial_sums"] = maj;
    if (cert.feasible != maj) {
      ok = false;
      return;
    }
    if (!maj) return;
    const auto channel = birkhoff_rare_synthesis(from.vec(), to.vec());
    const double residual = (channel.apply(from.vec()) - to.vec()).cwiseAbs().maxCoeff();
    worst = std::max(worst, residual);
    if (residual > tol.witness) ok = false;
  };
  direction(sp, sr, "forward");
  direction(sr, sp, "backward");
  out.verdict["birkhoff_residual"] = worst;
  out.ok = ok;
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> sample_classical_pair(CounterRng& rng, int n, int trial) {
  auto to_vec = [](const std::vector<double>& v) {
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  const Eigen::VectorXd p = to_vec(random_simplex_point(rng, n));
  auto permuted = [&](const Eigen::VectorXd& v) {
    const auto perm = random_permutation(rng, n);
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out(i) = v(perm[static_cast<std::size_t>(i)]);
    return out;
  };
  if (trial % 10 == 9) return {p, permuted(p)};
  if (trial % 2 == 0) return {p, to_vec(random_simplex_point(rng, n))};
  const int terms = 1 + rng.uniform_int(3);
  const auto w = random_simplex_point(rng, terms);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < terms; ++i) r += w[static_cast<std::size_t>(i)] * permuted(p);
  return {p, r};
}

// ---- maximal entanglement -----------------------------------------------

TrialOutcome max_ent_check(const q::PureBipartiteState& psi) {
  TrialOutcome out;
  const auto phi = q::PureBipartiteState::maximally_entangled(psi.dim_a());
  const bool to_max = q::nielsen_convertible(psi, phi);
  const bool lu = q::lu_equivalent(psi, phi);
  const bool from_max = q::nielsen_convertible(phi, psi);
  out.verdict["convertible_to_maximal"] = to_max;
  out.verdict["lu_equivalent_to_maximal"] = lu;
  out.verdict["maximal_converts_to_it"] = from_max;
  out.ok = to_max == lu && from_max;
  return out;
}

q::PureBipartiteState sample_max_ent_state(CounterRng& rng, int d, int trial) {
  switch (trial % 4) {
    case 0: {
      const auto phi = q::PureBipartiteState::maximally_entangled(d);
      Eigen::VectorXcd amps = q::kron(random_unitary(rng, d), random_unitary(rng, d)) * phi.amplitudes();
      return q::PureBipartiteState(d, d, amps / amps.norm());
    }
    case 1:
      return q::PureBipartiteState::product(random_unit_vector(rng, d), random_unit_vector(rng, d));
    default:
      return q::random_pure_state(rng, d, d);
  }
}

// ---- catalyst -------------------------------------------------------------

struct CatalystInput {
  Eigen::MatrixXcd rho;
  Eigen::MatrixXcd gamma;
  std::vector<q::UnitaryMixture> mixtures;
};

TrialOutcome catalyst_check(const CatalystInput& in, const Tolerances& tol) {
  TrialOutcome out;
  const q::DensityMatrix rho(in.rho), gamma(in.gamma);
  const auto cert = q::catalytic_erasure_possible(rho);
  const double purity_rho = rho.purity();
  const double purity_gamma = gamma.purity();
  const bool pure = purity_rho >= 1.0 - 1e-9;

  const Eigen::MatrixXcd joint = q::kron(in.rho, in.gamma);
  const double purity_joint = (joint * joint).trace().real();
  const double product_gap = std::abs(purity_joint - purity_rho * purity_gamma);
  // The erased target alpha_0 x gamma has purity Tr(gamma^2).
  const double joint_margin = purity_gamma - purity_joint;

  double worst_increase = -std::numeric_limits<double>::infinity();
  for (const auto& m : in.mixtures) {
    const Eigen::MatrixXcd image = m.apply(joint);
    worst_increase = std::max(worst_increase, (image * image).trace().real() - purity_joint);
  }

  out.verdict["erasure_possible"] = cert.possible;
  out.verdict["margin"] = cert.margin;
  out.verdict["joint_margin"] = joint_margin;
  out.verdict["product_gap"] = product_gap;
  out.verdict["max_purity_increase"] = worst_increase;
  out.verdict["measurement_entropy_bits"] = measurement_entropy(rho).value;

  out.ok = cert.possible == pure && std::abs(cert.margin - (1.0 - purity_rho)) <= tol.witness &&
           product_gap <= tol.witness && worst_increase <= tol.protocol &&
           (pure ? joint_margin <= tol.witness : joint_margin > 0.0);
  return out;
}

CatalystInput sample_catalyst(CounterRng& rng, int dim, int trial) {
  CatalystInput in;
  const int d = dim > 0 ? dim : 2 + rng.uniform_int(3);
  const int dg = 2 + rng.uniform_int(3);
  const int rank = trial % 5 == 4 ? 1 : 2 + rng.uniform_int(d - 1);
  in.rho = random_density(rng, d, rank);
  in.gamma = random_density(rng, dg, 1 + rng.uniform_int(dg));
  for (int k = 0; k < 2; ++k) {
    q::UnitaryMixture m;
    const int terms = 1 + rng.uniform_int(3);
    for (double w : random_simplex_point(rng, terms)) {
      m.weights.push_back(w);
      m.unitaries.push_back(random_unitary(rng, d * dg));
    }
    in.mixtures.push_back(std::move(m));
  }
  return in;
}

json catalyst_json(const CatalystInput& in) {
  json mixtures = json::array();
  for (const auto& m : in.mixtures) {
    json us = json::array();
    for (const auto& u : m.unitaries) us.push_back(exact_matrix(u));
    mixtures.push_back({{"weights", m.weights}, {"unitaries", us}});
  }
  return {{"rho", exact_matrix(in.rho)}, {"gamma", exact_matrix(in.gamma)}, {"mixtures", mixtures}};
}

CatalystInput catalyst_from(const json& j) {
  CatalystInput in;
  in.rho = complex_matrix_from_json(j.at("rho"), "rho");
  in.gamma = complex_matrix_from_json(j.at("gamma"), "gamma");
  for (const auto& m : j.at("mixtures")) {
    q::UnitaryMixture mix;
    mix.weights = m.at("weights").get<std::vector<double>>();
    for (const auto& u : m.at("unitaries")) mix.unitaries.push_back(complex_matrix_from_json(u, "unitary"));
    in.mixtures.push_back(std::move(mix));
  }
  return in;
}

// ---- driver --------------------------------------------------------------

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

// Runs one trial per fork of the seed. `trial` returns the serialized inputs
// and the outcome; exceptions count as counterexamples.
SuiteReport drive(const std::string& name, const TrialConfig& cfg,
                  const std::function<std::pair<json, TrialOutcome>(CounterRng&, int)>& trial,
                  const std::function<void(json&, const TrialOutcome&)>& aggregate) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  SuiteReport report;
  report.suite = name;
  report.config = cfg;
  const CounterRng root(cfg.seed, fnv1a(name));
  const Tolerances tol{cfg.witness_tol, cfg.protocol_tol};
  for (int t = 0; t < cfg.trials; ++t) {
    CounterRng rng = root.fork(static_cast<std::uint64_t>(t));
    json inputs;
    TrialOutcome outcome;
    try {
      std::tie(inputs, outcome) = trial(rng, t);
    } catch (const std::exception& e) {
      outcome.ok = false;
      outcome.verdict = {{"error", e.what()}};
    }
    ++report.trials_run;
    aggregate(report.summary, outcome);
    if (outcome.ok) {
      ++report.agreements;
      continue;
    }
    report.counterexamples.push_back(
        {{"suite", name}, {"trial", t}, {"inputs", inputs}, {"tolerances", tolerances_json(tol)}, {"verdict", outcome.verdict}});
    if (static_cast<int>(report.counterexamples.size()) >= cfg.max_counterexamples) break;
  }
  for (auto& [key, value] : report.summary.items())
    if (value.is_number_float()) value = round12(value.get<double>());
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

int suite_dim(const TrialConfig& cfg, int trial, int lo, int hi) {
  return cfg.dim > 0 ? cfg.dim : lo + trial % (hi - lo + 1);
}

}  // namespace

SuiteReport run_duality_suite(const TrialConfig& cfg) {
  const Tolerances tol{cfg.witness_tol, cfg.protocol_tol};
  return drive(
      "duality", cfg,
      [&](CounterRng& rng, int t) {
        const int d = suite_dim(cfg, t, 2, 4);
        const auto [psi, target] = sample_duality_pair(rng, d, t);
        json inputs = {{"psi", exact_state(psi)}, {"target", exact_state(target)}};
        return std::pair{inputs, duality_check(psi, target, tol)};
      },
      [](json& s, const TrialOutcome& o) {
        if (o.verdict.value("nielsen_convertible", false)) s["convertible"] = s.value("convertible", 0) + 1;
        if (o.verdict.contains("rare_residual")) {
          track_max(s, "max_rare_residual", o.verdict["rare_residual"].get<double>());
          track_max(s, "max_protocol_completeness", o.verdict["protocol_completeness"].get<double>());
          track_max(s, "max_protocol_proportionality", o.verdict["protocol_proportionality"].get<double>());
        }
      });
}

SuiteReport run_classical_agreement_suite(const TrialConfig& cfg) {
  const Tolerances tol{cfg.witness_tol, cfg.protocol_tol};
  if (cfg.dim > 6) throw CapacityError("classical agreement suite supports n <= 6");
  return drive(
      "classical-agreement", cfg,
      [&](CounterRng& rng, int t) {
        const int n = suite_dim(cfg, t, 2, 5);
        const auto [p, r] = sample_classical_pair(rng, n, t);
        json inputs = {{"p", exact_vector(p)}, {"q", exact_vector(r)}};
        return std::pair{inputs, classical_check(p, r, tol)};
      },
      [](json& s, const TrialOutcome& o) {
        if (o.verdict.value("forward_lp", false) || o.verdict.value("backward_lp", false))
          s["comparable"] = s.value("comparable", 0) + 1;
        if (o.verdict.contains("birkhoff_residual"))
          track_max(s, "max_birkhoff_residual", o.verdict["birkhoff_residual"].get<double>());
      });
}

SuiteReport run_maximal_entanglement_suite(const TrialConfig& cfg) {
  return drive(
      "max-ent", cfg,
      [&](CounterRng& rng, int t) {
        const int d = suite_dim(cfg, t, 2, 4);
        const auto psi = sample_max_ent_state(rng, d, t);
        return std::pair{json{{"psi", exact_state(psi)}}, max_ent_check(psi)};
      },
      [](json& s, const TrialOutcome& o) {
        if (o.verdict.value("convertible_to_maximal", false))
          s["convertible_to_maximal"] = s.value("convertible_to_maximal", 0) + 1;
      });
}

SuiteReport run_catalyst_suite(const TrialConfig& cfg) {
  const Tolerances tol{cfg.witness_tol, cfg.protocol_tol};
  if (cfg.dim > 4) throw CapacityError("catalyst suite supports dimensions up to 4");
  return drive(
      "catalyst", cfg,
      [&](CounterRng& rng, int t) {
        const auto in = sample_catalyst(rng, cfg.dim, t);
        return std::pair{catalyst_json(in), catalyst_check(in, tol)};
      },
      [](json& s, const TrialOutcome& o) {
        if (o.verdict.contains("measurement_entropy_bits"))
          track_max(s, "max_measurement_entropy_bits", o.verdict["measurement_entropy_bits"].get<double>());
        if (o.verdict.contains("max_purity_increase"))
          track_max(s, "max_purity_increase", o.verdict["max_purity_increase"].get<double>());
        if (o.verdict.value("erasure_possible", false)) s["pure_inputs"] = s.value("pure_inputs", 0) + 1;
      });
}

SuiteReport run_suite(const std::string& name, const TrialConfig& cfg) {
  if (name == "duality") return run_duality_suite(cfg);
  if (name == "classical-agreement") return run_classical_agreement_suite(cfg);
  if (name == "max-ent") return run_maximal_entanglement_suite(cfg);
  if (name == "catalyst") return run_catalyst_suite(cfg);
  throw PreconditionError("unknown suite '" + name + "'");
}

bool replay_counterexample(const json& ce) {
  const std::string suite = ce.at("suite").get<std::string>();
  const auto& in = ce.at("inputs");
  const Tolerances tol = tolerances_from(ce.at("tolerances"));
  try {
    if (suite == "duality") return !duality_check(state_from(in.at("psi")), state_from(in.at("target")), tol).ok;
    if (suite == "classical-agreement")
      return !classical_check(real_vector_from_json(in.at("p"), "p"), real_vector_from_json(in.at("q"), "q"), tol).ok;
    if (suite == "max-ent") return !max_ent_check(state_from(in.at("psi"))).ok;
    if (suite == "catalyst") return !catalyst_check(catalyst_from(in), tol).ok;
  } catch (const StructuralError&) {
    throw;
  } catch (const std::exception&) {
    return ce.at("verdict").contains("error");
  }
  throw PreconditionError("unknown suite '" + suite + "'");
}

}  // namespace entmix
