#pragma once

#include "patchsparse/core.hpp"
#include "patchsparse/graphmodel.hpp"
#include "patchsparse/measures.hpp"
#include "patchsparse/pursuit.hpp"

#include <json.hpp>

#include <string>

namespace patchsparse {

/// Comma separated numbers, one matrix row per line. A single column or a
/// single row both read as a vector.
Matrix read_csv_matrix(const std::string& path);
Vector read_csv_vector(const std::string& path);
void write_csv_matrix(const std::string& path, const Matrix& a);
void write_csv_vector(const std::string& path, const Vector& v);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// {"n", "m", "kind", "normalized", "data": row-major n x m, "scales"?}
nlohmann::json dictionary_to_json(const Dictionary& dict);
Dictionary dictionary_from_json(const nlohmann::json& j);

/// List of per-patch index lists.
nlohmann::json support_to_json(const SupportSequence& S);
SupportSequence support_from_json(const nlohmann::json& j, int m);

/// {"n", "m", "s", "nodes", "edges", "transfer": {"a-b": matrix rows}}
nlohmann::json graph_to_json(const DependencyGraph& g);
DependencyGraph graph_from_json(const nlohmann::json& j);

/// {xhat, gamma: [[patch, atom, value], ...], support, residual_norm,
///  overlap_violation, iterations, projected, warning}
nlohmann::json result_to_json(const PursuitResult& r);

nlohmann::json measure_to_json(const MeasureResult& r);

nlohmann::json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace patchsparse
