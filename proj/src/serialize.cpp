#include "entmix/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace entmix {

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x == 0.0 ? 0.0 : x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

nlohmann::json to_json(const Eigen::VectorXd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(round12(v(i)));
  return out;
}

nlohmann::json to_json(const Eigen::RowVectorXd& v) { return to_json(Eigen::VectorXd(v.transpose())); }

nlohmann::json to_json(const Eigen::MatrixXd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Eigen::VectorXd(m.row(r).transpose())));
  return out;
}

nlohmann::json to_json(const Eigen::VectorXcd& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({round12(v(i).real()), round12(v(i).imag())});
  return out;
}

nlohmann::json to_json(const Eigen::MatrixXcd& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Eigen::VectorXcd(m.row(r).transpose())));
  return out;
}

namespace {

double number_at(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw StructuralError(where + ": expected a number");
  return j.get<double>();
}

Complex complex_at(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw StructuralError(where + ": expected [re, im]");
  return {number_at(j[0], where + "[0]"), number_at(j[1], where + "[1]")};
}

}  // namespace

Eigen::VectorXd real_vector_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw StructuralError(where + ": expected a nonempty array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = number_at(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXd real_matrix_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw StructuralError(where + ": expected a nonempty array of rows");
  const auto first = real_vector_from_json(j[0], where + "[0]");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), first.size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = real_vector_from_json(j[r], where + "[" + std::to_string(r) + "]");
    if (row.size() != m.cols()) throw StructuralError(where + "[" + std::to_string(r) + "]: ragged row");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

Eigen::VectorXcd complex_vector_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw StructuralError(where + ": expected a nonempty array");
  Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = complex_at(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

Eigen::MatrixXcd complex_matrix_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw StructuralError(where + ": expected a nonempty array of rows");
  const auto first = complex_vector_from_json(j[0], where + "[0]");
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(j.size()), first.size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = complex_vector_from_json(j[r], where + "[" + std::to_string(r) + "]");
    if (row.size() != m.cols()) throw StructuralError(where + "[" + std::to_string(r) + "]: ragged row");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

Eigen::VectorXd parse_real_list(const std::string& text, const std::string& where) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  int pos = 0;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || end == item.c_str() || *end != '\0' || !std::isfinite(v))
      throw StructuralError(where + ": entry " + std::to_string(pos) + " ('" + item + "') is not a number");
    values.push_back(v);
    ++pos;
  }
  if (values.empty()) throw StructuralError(where + ": empty list");
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace entmix
