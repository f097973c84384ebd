#include "gospace/json_io.hpp"

#include "gospace/error.hpp"

namespace gospace {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json vector_to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("matrix: expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.front().size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ValidationError("matrix: ragged rows");
    }
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ValidationError("vector: expected an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

nlohmann::json to_json(const TolerancePolicy& tol) {
  return {{"rel_rank_tol", tol.rel_rank_tol},
          {"feas_tol", tol.feas_tol},
          {"margin_factor", tol.margin_factor}};
}

TolerancePolicy tolerance_from_json(const nlohmann::json& j) {
  TolerancePolicy tol;
  if (j.contains("rel_rank_tol")) tol.rel_rank_tol = j.at("rel_rank_tol").get<double>();
  if (j.contains("feas_tol")) tol.feas_tol = j.at("feas_tol").get<double>();
  if (j.contains("margin_factor")) tol.margin_factor = j.at("margin_factor").get<double>();
  tol.validate();
  return tol;
}

}  // namespace gospace
