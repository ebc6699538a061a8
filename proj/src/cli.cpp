#include "entmix/cli.hpp"

#include "entmix/boxworld.hpp"
#include "entmix/harness.hpp"
#include "entmix/mixedness.hpp"
#include "entmix/monotones.hpp"
#include "entmix/quantum.hpp"
#include "entmix/serialize.hpp"
#include "entmix/theory_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace entmix {

namespace {

using nlohmann::json;
namespace q = quantum;
namespace bw = boxworld;

// ---- input parsing -------------------------------------------------------

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

int parse_int(const std::string& text, const std::string& where) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw StructuralError(where + ": '" + text + "' is not an integer");
}

bool looks_like_file(const std::string& text) {
  return text.find('/') != std::string::npos || text.ends_with(".json");
}

// Accepts the full vector, or affine coordinates when the unit effect reads
// the last coordinate.
GptState parse_gpt_state(const SystemPtr& sys, const std::string& text, const std::string& where) {
  Eigen::VectorXd v = looks_like_file(text) ? real_vector_from_json(read_json_file(text), text)
                                            : parse_real_list(text, where);
  if (v.size() == sys->dim) return GptState(sys, v);
  Eigen::RowVectorXd last = Eigen::RowVectorXd::Zero(sys->dim);
  last(sys->dim - 1) = 1.0;
  if (v.size() == sys->dim - 1 && (sys->unit_effect - last).cwiseAbs().maxCoeff() <= kTol) {
    Eigen::VectorXd full(sys->dim);
    full << v, 1.0;
    return GptState(sys, full);
  }
  throw StructuralError(where + ": expected " + std::to_string(sys->dim) + " coordinates, got " +
                        std::to_string(v.size()));
}

q::PureBipartiteState pure_state_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("amplitudes"))
    throw StructuralError(where + ": expected an object with d_a, d_b and amplitudes");
  const auto amps = complex_vector_from_json(j.at("amplitudes"), where + ".amplitudes");
  const int da = j.value("d_a", 0);
  const int db = j.value("d_b", 0);
  if (da < 1 || db < 1) throw StructuralError(where + ": d_a and d_b must be positive integers");
  return q::PureBipartiteState(da, db, amps);
}

// bell, maxent:d, product:d, schmidt:p1,p2,..., random:d:seed, or a JSON file.
q::PureBipartiteState parse_pure_state(const std::string& text, const std::string& where) {
  const auto parts = split(text, ':');
  const std::string& kind = parts.empty() ? text : parts[0];
  if (text == "bell") return q::PureBipartiteState::maximally_entangled(2);
  if (kind == "maxent" && parts.size() == 2) return q::PureBipartiteState::maximally_entangled(parse_int(parts[1], where));
  if (kind == "product" && parts.size() == 2) {
    const int d = parse_int(parts[1], where);
    if (d < 1) throw StructuralError(where + ": dimension must be positive");
    const Eigen::VectorXcd e0 = Eigen::VectorXcd::Unit(d, 0);
    return q::PureBipartiteState::product(e0, e0);
  }
  if (kind == "schmidt" && parts.size() == 2) return q::PureBipartiteState::from_schmidt(parse_real_list(parts[1], where));
  if (kind == "random" && parts.size() == 3) {
    CounterRng rng(static_cast<std::uint64_t>(parse_int(parts[2], where)));
    const int d = parse_int(parts[1], where);
    return q::random_pure_state(rng, d, d);
  }
  if (looks_like_file(text)) return pure_state_from_json(read_json_file(text), text);
  throw StructuralError(where + ": unknown pure state '" + text +
                        "' (bell, maxent:d, product:d, schmidt:p,..., random:d:seed or a .json file)");
}

// maxmixed:d, diag:p1,..., random:d:rank:seed, or a JSON file holding a
// matrix of [re, im] entries.
q::DensityMatrix parse_density(const std::string& text, const std::string& where) {
  const auto parts = split(text, ':');
  const std::string& kind = parts.empty() ? text : parts[0];
  if (kind == "maxmixed" && parts.size() == 2) return q::DensityMatrix::maximally_mixed(parse_int(parts[1], where));
  if (kind == "diag" && parts.size() == 2) return q::DensityMatrix::diagonal(parse_real_list(parts[1], where));
  if (kind == "bell") {
    const auto psi = q::PureBipartiteState::maximally_entangled(2).amplitudes();
    return q::DensityMatrix(psi * psi.adjoint());
  }
  if (kind == "random" && parts.size() == 4) {
    CounterRng rng(static_cast<std::uint64_t>(parse_int(parts[3], where)));
    return q::DensityMatrix(random_density(rng, parse_int(parts[1], where), parse_int(parts[2], where)));
  }
  if (looks_like_file(text)) {
    const json j = read_json_file(text);
    return q::DensityMatrix(complex_matrix_from_json(j.is_object() ? j.at("matrix") : j, text));
  }
  throw StructuralError(where + ": unknown density matrix '" + text +
                        "' (maxmixed:d, diag:p,..., bell, random:d:rank:seed or a .json file)");
}

// pr, pr:k, pr:k:d, or a JSON file.
bw::BoxState parse_box(const std::string& text, const std::string& where) {
  const auto parts = split(text, ':');
  if (text == "pr") return bw::standard_pr_box();
  if (!parts.empty() && parts[0] == "pr" && (parts.size() == 2 || parts.size() == 3)) {
    const int k = parse_int(parts[1], where);
    const int d = parts.size() == 3 ? parse_int(parts[2], where) : k;
    return bw::pr_box_k(k, d, d);
  }
  if (looks_like_file(text)) {
    try {
      return bw::box_from_json(read_json_file(text));
    } catch (const StructuralError& e) {
      throw StructuralError(text + ": " + e.what());
    }
  }
  throw StructuralError(where + ": unknown box '" + text + "' (pr, pr:k, pr:k:d or a .json file)");
}

json rounded(const json& j) {
  if (j.is_number_float()) return round12(j.get<double>());
  if (j.is_array()) {
    json out = json::array();
    for (const auto& e : j) out.push_back(rounded(e));
    return out;
  }
  if (j.is_object()) {
    json out = json::object();
    // Serialized trial inputs keep full precision for replay.
    for (const auto& [k, v] : j.items()) out[k] = k == "inputs" ? v : rounded(v);
    return out;
  }
  return j;
}

std::string scalar_csv(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + scalar_csv(v[i]);
    return s;
  }
  return v.dump();
}

std::string generic_csv(const json& j) {
  std::string s = "key,value\n";
  for (const auto& [k, v] : j.items()) s += k + "," + scalar_csv(v) + "\n";
  return s;
}

json gpt_report_json(const MonotoneReport& r) {
  json witness = json::array();
  for (const auto& e : r.witness) witness.push_back(to_json(e));
  json out = {{"name", r.name}, {"value", r.value}, {"lower_bound", r.lower_bound}, {"witness", witness}};
  if (r.quantum_witness.size() > 0) out["eigenbasis"] = to_json(r.quantum_witness);
  return out;
}

json density_json(const q::DensityMatrix& rho) { return to_json(rho.matrix()); }

json pure_state_json(const q::PureBipartiteState& s) {
  return {{"d_a", s.dim_a()}, {"d_b", s.dim_b()}, {"amplitudes", to_json(s.amplitudes())}};
}

json kraus_json(const q::KrausChannel& c) {
  json out = json::array();
  for (const auto& k : c.ops()) out.push_back(to_json(k));
  return out;
}

json mixture_json(const q::UnitaryMixture& m) {
  json us = json::array();
  for (const auto& u : m.unitaries) us.push_back(to_json(u));
  return {{"weights", m.weights}, {"unitaries", us}};
}

// ---- dispatcher ----------------------------------------------------------

struct Result {
  Result() = default;
  Result(json b, int s = kExitOk) : body(std::move(b)), status(s) {}

  json body = json::object();
  int status = kExitOk;
  /// Preformatted CSV overriding the generic key/value rendering.
  std::string csv;
};

struct Options {
  std::string format = "json";
  std::string output;
  double tol = 1e-9;

  std::string system = "square";
  std::string rho, sigma, p, q;
  std::string name;
  int grid = 0;
  std::string state, target, density;
  std::string box;
  int k = 0, d = 0;
  int starts = 6;
  std::uint64_t seed = 1;
  int dim = 0, trials = 100;
  std::string report;
};

using Handler = std::function<Result(const Options&)>;

Result suite_result(const std::string& suite, const Options& o) {
  TrialConfig cfg;
  cfg.seed = o.seed;
  cfg.dim = o.dim;
  cfg.trials = o.trials;
  cfg.witness_tol = o.tol;
  cfg.protocol_tol = std::max(o.tol, 1e-8);
  const auto report = run_suite(suite, cfg);
  Result r;
  r.body = report.to_json();
  r.status = report.passed() ? kExitOk : kExitFailure;
  r.csv = SuiteReport::csv_header() + "\n" + report.csv_row() + "\n";
  return r;
}

Result monotone_result(const Options& o) {
  Result r;
  if (!o.density.empty()) {
    const auto rho = parse_density(o.density, "--density");
    if (o.name == "measurement-entropy") r.body = gpt_report_json(measurement_entropy(rho));
    else if (o.name == "purity-2norm") r.body = {{"name", o.name}, {"value", purity_2norm(rho)}};
    else throw PreconditionError("quantum states support the monotones measurement-entropy and purity-2norm");
    return r;
  }
  const auto sys = resolve_system(o.system);
  if (o.grid > 0) {
    if (sys->dim != 3 || o.grid < 2) throw PreconditionError("--grid needs a 3-dimensional system and at least 2 points");
    const auto f = o.name == "measurement-entropy" ? PurityFunction([](const GptState& s) { return measurement_entropy(s).value; })
                                                   : builtin_monotone(o.name);
    std::ostringstream csv;
    csv << "x,y,value\n";
    json rows = json::array();
    for (int i = 0; i < o.grid; ++i)
      for (int j = 0; j < o.grid; ++j) {
        const double x = -1.0 + 2.0 * i / (o.grid - 1);
        const double y = -1.0 + 2.0 * j / (o.grid - 1);
        const double v = f(GptState(sys, Eigen::Vector3d(x, y, 1.0)));
        csv << round12(x) << ',' << round12(y) << ',' << round12(v) << '\n';
        rows.push_back({x, y, v});
      }
    r.body = {{"name", o.name}, {"grid", rows}};
    r.csv = csv.str();
    return r;
  }
  const auto rho = parse_gpt_state(sys, o.rho, "--rho");
  if (o.name == "measurement-entropy") r.body = gpt_report_json(measurement_entropy(rho));
  else if (o.name == "x2-purity") r.body = gpt_report_json(f_purity(rho, ConvexScalarFn::square()));
  else if (o.name == "xlogx-purity") r.body = gpt_report_json(f_purity(rho, ConvexScalarFn::xlogx()));
  else if (o.name == "op-norm") r.body = gpt_report_json(op_norm_report(rho, invariant_state(sys)));
  else r.body = {{"name", o.name}, {"value", builtin_monotone(o.name)(rho)}};
  return r;
}

std::map<std::string, Handler> handlers() {
  std::map<std::string, Handler> h;

  h["validate-system"] = [](const Options& o) {
    Result r;
    std::shared_ptr<const TheorySystem> sys;
    if (looks_like_file(o.system)) {
      try {
        sys = parse_theory(read_json_file(o.system), o.system);
      } catch (const StructuralError& e) {
        throw StructuralError(o.system + ": " + e.what());
      }
    } else {
      sys = resolve_system(o.system);
    }
    const auto report = validate_system(*sys);
    r.body = report_to_json(report);
    r.status = report.ok() ? kExitOk : kExitFailure;
    return r;
  };
  h["make-square-bit"] = [](const Options&) { return Result{theory_to_json(*make_square_bit())}; };
  h["more-mixed"] = [](const Options& o) {
    const auto sys = resolve_system(o.system);
    const auto cert = more_mixed(parse_gpt_state(sys, o.rho, "--rho"), parse_gpt_state(sys, o.sigma, "--sigma"));
    json weights = json::array();
    for (Eigen::Index i = 0; i < cert.weights.size(); ++i)
      if (cert.weights(i) > 0.0) weights.push_back({{"group_index", i}, {"weight", cert.weights(i)}});
    return Result{{{"more_mixed", cert.feasible}, {"weights", weights}, {"residual", cert.residual}}};
  };
  h["equally-mixed"] = [](const Options& o) {
    const auto sys = resolve_system(o.system);
    const auto eq = equally_mixed(parse_gpt_state(sys, o.rho, "--rho"), parse_gpt_state(sys, o.sigma, "--sigma"));
    return Result{{{"equally_mixed", eq.equal}, {"witness", eq.witness ? json(*eq.witness) : json(nullptr)}}};
  };
  h["invariant-state"] = [](const Options& o) {
    return Result{{{"state", to_json(invariant_state(resolve_system(o.system)).vec())}}};
  };
  h["orbit-hull"] = [](const Options& o) {
    const auto sys = resolve_system(o.system);
    json vertices = json::array();
    for (const auto& v : orbit_hull(parse_gpt_state(sys, o.rho, "--rho"))) vertices.push_back(to_json(v));
    return Result{{{"count", vertices.size()}, {"vertices", vertices}}};
  };
  h["majorizes"] = [](const Options& o) {
    return Result{{{"majorizes", majorizes(parse_real_list(o.p, "--p"), parse_real_list(o.q, "--q"), o.tol)}}};
  };
  h["birkhoff"] = [](const Options& o) {
    const auto p = parse_real_list(o.p, "--p");
    const auto qv = parse_real_list(o.q, "--q");
    const auto channel = birkhoff_rare_synthesis(p, qv);
    json terms = json::array();
    for (const auto& e : channel.entries())
      terms.push_back({{"weight", e.weight}, {"permutation", permutation_of(*channel.system(), e.group_index)}});
    const double residual = (channel.apply(p) - qv).cwiseAbs().maxCoeff();
    Result r{{{"terms", terms}, {"residual", residual}}};
    r.status = residual <= std::max(o.tol, 1e-9) ? kExitOk : kExitFailure;
    return r;
  };
  h["monotone"] = monotone_result;
  h["schmidt"] = [](const Options& o) {
    const auto s = q::schmidt_decompose(parse_pure_state(o.state, "--state"));
    return Result{{{"coefficients", to_json(s.coefficients)}, {"left", to_json(s.left)}, {"right", to_json(s.right)}}};
  };
  h["marginals"] = [](const Options& o) {
    const auto [a, b] = q::marginals(parse_pure_state(o.state, "--state"));
    return Result{{{"rho_a", density_json(a)},
                   {"rho_b", density_json(b)},
                   {"spectrum_a", to_json(q::spectral(a.matrix()).values)},
                   {"spectrum_b", to_json(q::spectral(b.matrix()).values)}}};
  };
  h["purify"] = [](const Options& o) { return Result{pure_state_json(q::purify(parse_density(o.density, "--density")))}; };
  h["sym-purify"] = [](const Options& o) {
    return Result{pure_state_json(q::symmetric_purify(parse_density(o.density, "--density")))};
  };
  h["nielsen"] = [](const Options& o) {
    return Result{{{"convertible", q::nielsen_convertible(parse_pure_state(o.state, "--state"),
                                                          parse_pure_state(o.target, "--target"))}}};
  };
  h["lu-equiv"] = [](const Options& o) {
    return Result{{{"lu_equivalent", q::lu_equivalent(parse_pure_state(o.state, "--state"),
                                                      parse_pure_state(o.target, "--target"), std::max(o.tol, 1e-12))}}};
  };
  h["locex-quantum"] = [](const Options& o) {
    const auto psi = parse_pure_state(o.state, "--state");
    const auto [c, d] = q::local_exchange_channels(psi);
    const double residual = q::local_exchange_residual(psi, c, d);
    Result r{{{"c_kraus", kraus_json(c)}, {"d_kraus", kraus_json(d)}, {"residual", residual}}};
    r.status = residual <= std::max(o.tol, 1e-9) ? kExitOk : kExitFailure;
    return r;
  };
  h["rare-quantum"] = [](const Options& o) {
    const auto rho = parse_density(o.density, "--density");
    const auto rho_prime = parse_density(o.target, "--target");
    const auto mix = q::rare_synthesis_quantum(rho, rho_prime);
    const double residual = (mix.apply(rho_prime.matrix()) - rho.matrix()).cwiseAbs().maxCoeff();
    Result r{mixture_json(mix)};
    r.body["residual"] = residual;
    r.status = residual <= std::max(o.tol, 1e-9) ? kExitOk : kExitFailure;
    return r;
  };
  h["one-way"] = [](const Options& o) {
    const auto psi = parse_pure_state(o.state, "--state");
    const auto target = parse_pure_state(o.target, "--target");
    const auto mix = q::rare_synthesis_quantum(q::marginals(psi).first, q::marginals(target).first);
    const auto protocol = q::one_way_locc_from_rare(psi, target, mix);
    const auto check = q::check_protocol(protocol, psi, target);
    json bob = json::array(), alice = json::array();
    for (const auto& b : protocol.bob_instrument) bob.push_back(to_json(b));
    for (const auto& a : protocol.alice_corrections) alice.push_back(to_json(a));
    Result r{{{"bob_instrument", bob},
              {"alice_corrections", alice},
              {"outcome_probs", protocol.outcome_probs},
              {"completeness", check.completeness},
              {"proportionality", check.proportionality},
              {"overlap", check.overlap}}};
    const double tol = std::max(o.tol, 1e-8);
    r.status = check.completeness <= tol && check.proportionality <= tol ? kExitOk : kExitFailure;
    return r;
  };
  h["eof"] = [](const Options& o) {
    q::EofOptions opts;
    opts.starts = o.starts;
    opts.seed = o.seed;
    const auto res = q::entanglement_of_formation(parse_density(o.density, "--density"), opts);
    return Result{{{"value", res.value}, {"ensemble_size", res.ensemble_size}, {"probabilities", res.probabilities}}};
  };
  h["catalyst"] = [](const Options& o) {
    const auto cert = q::catalytic_erasure_possible(parse_density(o.density, "--density"));
    return Result{{{"possible", cert.possible}, {"purity", cert.purity}, {"margin", cert.margin}}};
  };
  h["make-pr"] = [](const Options& o) {
    if (o.k == 0) return Result{bw::box_to_json(bw::standard_pr_box())};
    const int d = o.d > 0 ? o.d : o.k;
    return Result{bw::box_to_json(bw::pr_box_k(o.k, d, d))};
  };
  h["check-ns"] = [](const Options& o) {
    const auto rep = bw::check_no_signalling(parse_box(o.box, "--box"));
    return Result{{{"no_signalling", rep.ok}, {"failures", rep.failures}}, rep.ok ? kExitOk : kExitFailure};
  };
  h["check-extreme"] = [](const Options& o) {
    const auto box = parse_box(o.box, "--box");
    const auto rep = bw::check_no_signalling(box);
    if (!rep.ok) throw PreconditionError("box is not a valid no-signalling box: " + rep.failures.front());
    return Result{{{"extreme", bw::is_extreme(box)}}};
  };
  h["check-locex"] = [](const Options& o) {
    const auto cert = bw::check_local_exchangeability(parse_box(o.box, "--box"));
    Result r{{{"found", cert.found}}};
    if (cert.found) {
      r.body["alice"] = bw::relabeling_to_json(cert.alice);
      r.body["bob"] = bw::relabeling_to_json(cert.bob);
    }
    r.status = cert.found ? kExitOk : kExitFailure;
    return r;
  };
  h["duality"] = [](const Options& o) { return suite_result("duality", o); };
  h["classical-agreement"] = [](const Options& o) { return suite_result("classical-agreement", o); };
  h["max-ent"] = [](const Options& o) { return suite_result("max-ent", o); };
  h["catalyst-suite"] = [](const Options& o) { return suite_result("catalyst", o); };
  h["replay"] = [](const Options& o) {
    const json report = read_json_file(o.report);
    if (!report.contains("counterexamples") || !report["counterexamples"].is_array())
      throw StructuralError(o.report + ": missing array 'counterexamples'");
    json outcomes = json::array();
    bool any = false;
    for (const auto& ce : report["counterexamples"]) {
      const bool reproduced = replay_counterexample(ce);
      any = any || reproduced;
      outcomes.push_back({{"trial", ce.value("trial", -1)}, {"reproduced", reproduced}});
    }
    return Result{{{"replayed", outcomes}}, any ? kExitFailure : kExitOk};
  };
  return h;
}

struct VerbSpec {
  const char* name;
  const char* help;
  std::function<void(CLI::App&, Options&)> options;
};

void add_system(CLI::App& c, Options& o) {
  c.add_option("--system", o.system, "square, classical:N, or a theory JSON file")->capture_default_str();
}

std::vector<VerbSpec> verb_specs() {
  auto rho_sigma = [](CLI::App& c, Options& o) {
    add_system(c, o);
    c.add_option("--rho", o.rho, "state coordinates, comma separated")->required();
    c.add_option("--sigma", o.sigma, "state coordinates, comma separated")->required();
  };
  auto pq = [](CLI::App& c, Options& o) {
    c.add_option("--p", o.p, "probability vector")->required();
    c.add_option("--q", o.q, "probability vector")->required();
  };
  auto one_state = [](CLI::App& c, Options& o) {
    c.add_option("--state", o.state, "pure bipartite state")->required();
  };
  auto two_states = [](CLI::App& c, Options& o) {
    c.add_option("--state", o.state, "source pure bipartite state")->required();
    c.add_option("--target", o.target, "target pure bipartite state")->required();
  };
  auto density = [](CLI::App& c, Options& o) {
    c.add_option("--density", o.density, "density matrix")->required();
  };
  auto box = [](CLI::App& c, Options& o) { c.add_option("--box", o.box, "pr, pr:k, pr:k:d, or a box JSON file")->required(); };
  auto suite = [](CLI::App& c, Options& o) {
    c.add_option("--dim", o.dim, "dimension (0 cycles through the default range)")->capture_default_str();
    c.add_option("--trials", o.trials, "number of trials")->capture_default_str();
    c.add_option("--seed", o.seed, "generator seed")->capture_default_str();
  };
  return {
      {"validate-system", "check every invariant of a theory", [](CLI::App& c, Options& o) { add_system(c, o); }},
      {"make-square-bit", "emit the square-bit theory", [](CLI::App&, Options&) {}},
      {"more-mixed", "decide whether sigma is more mixed than rho", rho_sigma},
      {"equally-mixed", "decide whether rho and sigma are equally mixed", rho_sigma},
      {"invariant-state", "the unique invariant state", [](CLI::App& c, Options& o) { add_system(c, o); }},
      {"orbit-hull", "extreme points of the group orbit of rho",
       [](CLI::App& c, Options& o) {
         add_system(c, o);
         c.add_option("--rho", o.rho, "state coordinates")->required();
       }},
      {"majorizes", "partial-sum majorization of q by p", pq},
      {"birkhoff", "permutation mixture mapping p to q", pq},
      {"monotone", "evaluate a purity monotone",
       [](CLI::App& c, Options& o) {
         add_system(c, o);
         c.add_option("--name", o.name, "x2-purity, xlogx-purity, neg-entropy, op-norm, purity-2norm, measurement-entropy")
             ->required();
         c.add_option("--rho", o.rho, "state coordinates");
         c.add_option("--density", o.density, "quantum density matrix instead of a GPT state");
         c.add_option("--grid", o.grid, "emit values on a grid over the square state space");
       }},
      {"schmidt", "Schmidt decomposition", one_state},
      {"marginals", "both reduced states", one_state},
      {"purify", "a purification", density},
      {"sym-purify", "purification with equal marginals", density},
      {"nielsen", "LOCC convertibility of state into target", two_states},
      {"lu-equiv", "local-unitary equivalence", two_states},
      {"locex-quantum", "local exchange channels", one_state},
      {"rare-quantum", "unitary mixture mapping target to density",
       [](CLI::App& c, Options& o) {
         c.add_option("--density", o.density, "more mixed state")->required();
         c.add_option("--target", o.target, "less mixed state")->required();
       }},
      {"one-way", "one-way LOCC protocol turning state into target", two_states},
      {"eof", "entanglement of formation of a two-qubit state",
       [](CLI::App& c, Options& o) {
         c.add_option("--density", o.density, "density matrix")->required();
         c.add_option("--starts", o.starts, "optimizer restarts")->capture_default_str();
         c.add_option("--seed", o.seed, "seed for random restarts")->capture_default_str();
       }},
      {"catalyst", "catalytic erasure certificate", density},
      {"make-pr", "emit a PR box",
       [](CLI::App& c, Options& o) {
         c.add_option("--k", o.k, "family parameter (omit for the standard box)");
         c.add_option("--d", o.d, "outcomes per side (defaults to k)");
       }},
      {"check-ns", "exact no-signalling check", box},
      {"check-extreme", "exact vertex test", box},
      {"check-locex", "search for local exchange relabelings", box},
      {"duality", "entanglement/mixedness duality suite", suite},
      {"classical-agreement", "LP versus partial-sum agreement suite", suite},
      {"max-ent", "maximal entanglement suite", suite},
      {"catalyst-suite", "catalytic erasure suite", suite},
      {"replay", "replay the counterexamples of a report",
       [](CLI::App& c, Options& o) { c.add_option("--report", o.report, "report JSON file")->required(); }},
  };
}

int emit(const Result& result, const Options& o, std::ostream& out, std::ostream& err) {
  std::string text;
  if (o.format == "csv") text = result.csv.empty() ? generic_csv(rounded(result.body)) : result.csv;
  else text = rounded(result.body).dump(2) + "\n";
  if (o.output.empty()) {
    out << text;
  } else {
    std::ofstream file(o.output);
    if (!file) {
      err << "error: cannot write '" << o.output << "'\n";
      return kExitUsage;
    }
    file << text;
  }
  return result.status;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toolkit for purity, entanglement and their duality in probabilistic theories", "entmix"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  if (const char* env = std::getenv("ENTMIX_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0)) {
      err << "error: ENTMIX_TOL='" << env << "' is not a positive number\n";
      return kExitUsage;
    }
    o.tol = v;
  }
  app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--output", o.output, "write the result to this file");
  app.add_option("--tol", o.tol, "verdict tolerance (default from ENTMIX_TOL)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::map<std::string, CLI::App*> commands;
  for (const auto& spec : verb_specs()) {
    CLI::App* cmd = app.add_subcommand(spec.name, spec.help);
    spec.options(*cmd, o);
    commands[spec.name] = cmd;
  }

  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--format" || a == "--output" || a == "--tol") {
      ++i;
      continue;
    }
    if (a.empty() || a[0] == '-') continue;
    if (!commands.count(a)) {
      err << "error: unknown verb '" << a << "'\n";
      return kExitUsage;
    }
    break;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const auto table = handlers();
  for (const auto& [name, cmd] : commands) {
    if (!cmd->parsed()) continue;
    try {
      return emit(table.at(name)(o), o, out, err);
    } catch (const EnumerationBoundError& e) {
      err << "error: " << e.what() << " (lower bound " << round12(e.partial().value) << ")\n";
      return kExitFailure;
    } catch (const StructuralError& e) {
      err << "error: malformed input: " << e.what() << "\n";
      return kExitUsage;
    } catch (const PreconditionError& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const CapacityError& e) {
      err << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitFailure;
    }
  }
  err << "error: no verb given\n";
  return kExitUsage;
}

}  // namespace entmix
