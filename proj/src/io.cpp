#include "patchsparse/io.hpp"

#include "patchsparse/errors.hpp"

#include <fstream>
#include <sstream>

namespace patchsparse {

using nlohmann::json;

Matrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw DimensionError("non-numeric CSV entry '" + cell + "' in " + path);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) return Matrix(0, 0);
  const std::size_t cols = rows[0].size();
  Matrix a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != cols) throw DimensionError("ragged CSV rows in " + path);
    for (std::size_t c = 0; c < cols; ++c) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return a;
}

Vector read_csv_vector(const std::string& path) {
  const Matrix a = read_csv_matrix(path);
  if (a.cols() == 1) return a.col(0);
  if (a.rows() == 1) return a.row(0).transpose();
  throw DimensionError("expected a single row or column in " + path);
}

void write_csv_matrix(const std::string& path, const Matrix& a) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.precision(17);
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) out << (c ? "," : "") << a(r, c);
    out << '\n';
  }
}

void write_csv_vector(const std::string& path, const Vector& v) { write_csv_matrix(path, Matrix(v)); }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

json matrix_to_json(const Matrix& a) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back(a(r, c));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw DimensionError("matrix must be a list of rows");
  if (j.empty()) return Matrix(0, 0);
  const std::size_t cols = j[0].size();
  Matrix a(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != cols) throw DimensionError("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c)
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
  }
  return a;
}

json dictionary_to_json(const Dictionary& dict) {
  json j{{"n", dict.n()},
         {"m", dict.m()},
         {"kind", to_string(dict.kind())},
         {"normalized", dict.normalized()},
         {"data", matrix_to_json(dict.atoms())}};
  if (dict.scales().size()) j["scales"] = std::vector<double>(dict.scales().data(), dict.scales().data() + dict.scales().size());
  return j;
}

Dictionary dictionary_from_json(const json& j) {
  try {
    const Matrix data = matrix_from_json(j.at("data"));
    if (data.rows() != j.at("n").get<int>() || data.cols() != j.at("m").get<int>())
      throw DimensionError("dictionary data does not match n x m");
    Dictionary d(data, dictionary_kind_from_string(j.value("kind", std::string("custom"))), j.value("normalized", false));
    if (j.contains("scales")) {
      const auto s = j.at("scales").get<std::vector<double>>();
      d.set_scales(Eigen::Map<const Vector>(s.data(), static_cast<Eigen::Index>(s.size())));
    }
    return d;
  } catch (const json::exception& e) {
    throw DimensionError(std::string("invalid dictionary JSON: ") + e.what());
  }
}

json support_to_json(const SupportSequence& S) { return json(S.supports()); }

SupportSequence support_from_json(const json& j, int m) {
  return SupportSequence(j.get<std::vector<std::vector<int>>>(), m);
}

json graph_to_json(const DependencyGraph& g) {
  json edges = json::array();
  for (const auto& [a, b] : g.edges) edges.push_back({a, b});
  json transfer = json::object();
  for (const auto& [key, C] : g.transfer)
    transfer[std::to_string(key.first) + "-" + std::to_string(key.second)] = matrix_to_json(C);
  return json{{"n", g.n}, {"m", g.m}, {"s", g.s}, {"nodes", g.nodes}, {"edges", edges}, {"transfer", transfer}};
}

DependencyGraph graph_from_json(const json& j) {
  DependencyGraph g;
  try {
    g.n = j.value("n", 0);
    g.m = j.at("m").get<int>();
    g.s = j.value("s", 0);
    g.nodes = j.at("nodes").get<std::vector<std::vector<int>>>();
    for (const auto& e : j.at("edges")) g.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    if (j.contains("transfer"))
      for (const auto& [key, val] : j.at("transfer").items()) {
        const auto dash = key.find('-');
        if (dash == std::string::npos) throw DimensionError("transfer key must read a-b");
        g.transfer[{std::stoi(key.substr(0, dash)), std::stoi(key.substr(dash + 1))}] = matrix_from_json(val);
      }
  } catch (const json::exception& e) {
    throw DimensionError(std::string("invalid graph JSON: ") + e.what());
  }
  const int count = static_cast<int>(g.nodes.size());
  for (const auto& [a, b] : g.edges)
    if (a < 0 || b < 0 || a >= count || b >= count) throw DimensionError("graph edge refers to a missing node");
  return g;
}

json result_to_json(const PursuitResult& r) {
  json gamma = json::array();
  for (int i = 0; i < r.gamma.P(); ++i)
    for (int j = 0; j < r.gamma.m(); ++j)
      if (r.gamma.blocks()(j, i) != 0.0) gamma.push_back({i, j, r.gamma.blocks()(j, i)});
  json out{{"xhat", std::vector<double>(r.xhat.data(), r.xhat.data() + r.xhat.size())},
           {"gamma", gamma},
           {"support", support_to_json(r.support)},
           {"residual_norm", r.residual_norm},
           {"overlap_violation", r.overlap_violation},
           {"iterations", r.iterations},
           {"projected", r.projected},
           {"warning", r.warning}};
  if (!r.message.empty()) out["message"] = r.message;
  return out;
}

json measure_to_json(const MeasureResult& r) {
  json out{{"value", r.value}, {"exact", r.exact}};
  if (!r.witness.empty()) out["witness"] = r.witness;
  return out;
}

}  // namespace patchsparse
