#include "entmix/theory_io.hpp"

#include <fstream>
#include <sstream>

namespace entmix {

namespace {

using nlohmann::json;

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) throw StructuralError("field '" + where + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw StructuralError("field '" + where + "[" + std::to_string(i) + "]' is not a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

Eigen::VectorXd column(const json& j, const std::string& where) {
  auto v = numbers(j, where);
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

const json& field(const json& j, const char* name) {
  if (!j.contains(name)) throw StructuralError(std::string("missing field '") + name + "'");
  return j.at(name);
}

}  // namespace

std::shared_ptr<TheorySystem> parse_theory(const json& j, const std::string& name) {
  if (!j.is_object()) throw StructuralError("theory definition must be a JSON object");
  auto sys = std::make_shared<TheorySystem>();
  sys->name = j.value("name", name);
  const json& dim = field(j, "dim");
  if (!dim.is_number_integer()) throw StructuralError("field 'dim' must be an integer");
  sys->dim = dim.get<int>();
  sys->unit_effect = column(field(j, "unit_effect"), "unit_effect").transpose();

  const json& states = field(j, "pure_states");
  if (!states.is_array()) throw StructuralError("field 'pure_states' must be an array");
  for (std::size_t i = 0; i < states.size(); ++i)
    sys->pure_states.push_back(column(states[i], "pure_states[" + std::to_string(i) + "]"));

  const json& effects = field(j, "extremal_effects");
  if (!effects.is_array()) throw StructuralError("field 'extremal_effects' must be an array");
  for (std::size_t i = 0; i < effects.size(); ++i)
    sys->extremal_effects.push_back(column(effects[i], "extremal_effects[" + std::to_string(i) + "]").transpose());

  const json& group = field(j, "group");
  if (!group.is_array()) throw StructuralError("field 'group' must be an array");
  for (std::size_t k = 0; k < group.size(); ++k) {
    const std::string where = "group[" + std::to_string(k) + "]";
    if (!group[k].is_array()) throw StructuralError("field '" + where + "' must be a matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(group[k].size()), sys->dim);
    for (std::size_t r = 0; r < group[k].size(); ++r) {
      auto row = numbers(group[k][r], where + "[" + std::to_string(r) + "]");
      if (static_cast<int>(row.size()) != sys->dim)
        throw StructuralError("dimension mismatch in field '" + where + "': row length differs from dim");
      for (int c = 0; c < sys->dim; ++c) m(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)];
    }
    sys->group.push_back(std::move(m));
  }
  return sys;
}

SystemPtr load_theory(const json& j, const std::string& name) {
  auto sys = parse_theory(j, name);
  const auto report = validate_system(*sys);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw PreconditionError("theory '" + sys->name + "' violates " + v.invariant + " at index " +
                            std::to_string(v.index) + ": " + v.detail);
  }
  return sys;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw StructuralError(path + ": " + e.what());
  }
}

SystemPtr load_theory_file(const std::string& path) {
  const json j = read_json_file(path);
  try {
    return load_theory(j, path);
  } catch (const StructuralError& e) {
    throw StructuralError(path + ": " + e.what());
  }
}

json theory_to_json(const TheorySystem& sys) {
  json j;
  j["name"] = sys.name;
  j["dim"] = sys.dim;
  j["unit_effect"] = std::vector<double>(sys.unit_effect.data(), sys.unit_effect.data() + sys.unit_effect.size());
  j["pure_states"] = json::array();
  for (const auto& v : sys.pure_states) j["pure_states"].push_back(std::vector<double>(v.data(), v.data() + v.size()));
  j["extremal_effects"] = json::array();
  for (const auto& e : sys.extremal_effects)
    j["extremal_effects"].push_back(std::vector<double>(e.data(), e.data() + e.size()));
  j["group"] = json::array();
  for (const auto& g : sys.group) {
    json m = json::array();
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      Eigen::RowVectorXd row = g.row(r);
      m.push_back(std::vector<double>(row.data(), row.data() + row.size()));
    }
    j["group"].push_back(std::move(m));
  }
  return j;
}

SystemPtr resolve_system(const std::string& spec) {
  if (spec == "square" || spec == "square-bit") return make_square_bit();
  if (spec.rfind("classical:", 0) == 0) {
    int n = 0;
    try {
      n = std::stoi(spec.substr(10));
    } catch (const std::exception&) {
      throw StructuralError("bad classical system size in '" + spec + "'");
    }
    return make_classical(n);
  }
  return load_theory_file(spec);
}

json report_to_json(const ValidationReport& report) {
  json j;
  j["valid"] = report.ok();
  j["violations"] = json::array();
  for (const auto& v : report.violations)
    j["violations"].push_back({{"invariant", v.invariant}, {"index", v.index}, {"residual", v.residual}, {"detail", v.detail}});
  return j;
}

}  // namespace entmix
