#pragma once

#include "entmix/gpt_core.hpp"

#include <json.hpp>

#include <string>

namespace entmix {

/// Parses a theory definition with fields dim, unit_effect, pure_states,
/// extremal_effects and group. Throws StructuralError on malformed input and
/// PreconditionError when validate_system reports violations.
SystemPtr load_theory(const nlohmann::json& j, const std::string& name = "custom");
/// Parsing only; the caller decides whether to run validate_system.
std::shared_ptr<TheorySystem> parse_theory(const nlohmann::json& j, const std::string& name = "custom");
/// Throws StructuralError carrying the path and parser position.
nlohmann::json read_json_file(const std::string& path);
SystemPtr load_theory_file(const std::string& path);

nlohmann::json theory_to_json(const TheorySystem& sys);

/// "classical:N", "square", or a path to a theory file.
SystemPtr resolve_system(const std::string& spec);

nlohmann::json report_to_json(const ValidationReport& report);

}  // namespace entmix
