#pragma once

#include <nlohmann/json.hpp>

#include "gospace/numerics.hpp"

namespace gospace {

/// Matrices serialize as arrays of rows; vectors as flat arrays.
nlohmann::json matrix_to_json(const Matrix& m);
nlohmann::json vector_to_json(const Vector& v);
Matrix matrix_from_json(const nlohmann::json& j);
Vector vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TolerancePolicy& tol);
TolerancePolicy tolerance_from_json(const nlohmann::json& j);

/// Report format version shared by every JSON document the library emits.
inline constexpr const char* kSchemaVersion = "gospace.report/1";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace gospace
