#pragma once

// JSON encodings shared by the CLI and the harness reports. Complex numbers
// are [re, im] pairs; matrices are arrays of rows.

#include "entmix/common.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace entmix {

/// Rounds to 12 significant digits so emitted numbers are stable under
/// last-bit noise.
double round12(double x);

nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const Eigen::RowVectorXd& v);
nlohmann::json to_json(const Eigen::MatrixXd& m);
nlohmann::json to_json(const Eigen::VectorXcd& v);
nlohmann::json to_json(const Eigen::MatrixXcd& m);

/// The parsers throw StructuralError naming `where` on malformed input.
Eigen::VectorXd real_vector_from_json(const nlohmann::json& j, const std::string& where);
Eigen::MatrixXd real_matrix_from_json(const nlohmann::json& j, const std::string& where);
Eigen::VectorXcd complex_vector_from_json(const nlohmann::json& j, const std::string& where);
Eigen::MatrixXcd complex_matrix_from_json(const nlohmann::json& j, const std::string& where);

/// Comma-separated reals such as "0.7,0.3".
Eigen::VectorXd parse_real_list(const std::string& text, const std::string& where);

}  // namespace entmix
