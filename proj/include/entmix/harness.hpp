#pragma once

// Seeded cross-validation suites. Each trial draws its inputs from an
// independent fork of the generator, so a report depends only on its config.

#include "entmix/common.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace entmix {

struct TrialConfig {
  std::uint64_t seed = 1;
  /// Local dimension (quantum suites) or vector length (classical suite);
  /// 0 lets a suite cycle through its default range.
  int dim = 0;
  int trials = 100;
  /// Reconstruction tolerance for synthesized RaRe witnesses.
  double witness_tol = 1e-9;
  /// Tolerance for protocol invariants and monotonicity checks.
  double protocol_tol = 1e-8;
  int max_counterexamples = 10;

  /// Throws PreconditionError unless trials >= 1 and tolerances > 0.
  void validate() const;
  nlohmann::json to_json() const;
};

struct SuiteReport {
  std::string suite;
  TrialConfig config;
  int trials_run = 0;
  int agreements = 0;
  /// Each entry holds the suite name, trial index, full inputs and verdict.
  std::vector<nlohmann::json> counterexamples;
  /// Suite-specific aggregates (maximum residuals, counts).
  nlohmann::json summary = nlohmann::json::object();
  double wall_seconds = 0.0;

  bool passed() const { return counterexamples.empty(); }
  nlohmann::json to_json(bool include_wall_time = true) const;
  static std::string csv_header();
  std::string csv_row() const;
};

SuiteReport run_duality_suite(const TrialConfig& cfg);
SuiteReport run_classical_agreement_suite(const TrialConfig& cfg);
SuiteReport run_maximal_entanglement_suite(const TrialConfig& cfg);
SuiteReport run_catalyst_suite(const TrialConfig& cfg);

/// Dispatches on the names duality, classical-agreement, max-ent, catalyst.
SuiteReport run_suite(const std::string& name, const TrialConfig& cfg);

/// Re-evaluates a serialized counterexample standalone; true when the
/// disagreement reproduces.
bool replay_counterexample(const nlohmann::json& counterexample);

}  // namespace entmix
