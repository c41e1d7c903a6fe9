#include "patchsparse/graphmodel.hpp"

#include "patchsparse/combinatorics.hpp"
#include "patchsparse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace patchsparse {

int DependencyGraph::node_index(const std::vector<int>& support) const {
  std::vector<int> key = support;
  std::sort(key.begin(), key.end());
  const auto it = std::find(nodes.begin(), nodes.end(), key);
  return it == nodes.end() ? -1 : static_cast<int>(it - nodes.begin());
}

bool DependencyGraph::has_edge(int a, int b) const {
  return std::find(edges.begin(), edges.end(), std::make_pair(a, b)) != edges.end();
}

bool DependencyGraph::has_edge(const std::vector<int>& a, const std::vector<int>& b) const {
  const int ia = node_index(a), ib = node_index(b);
  return ia >= 0 && ib >= 0 && has_edge(ia, ib);
}

std::vector<std::vector<int>> DependencyGraph::successors() const {
  std::vector<std::vector<int>> succ(nodes.size());
  for (const auto& [a, b] : edges) succ[static_cast<std::size_t>(a)].push_back(b);
  for (auto& v : succ) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return succ;
}


DependencyGraph build_graph(const Dictionary& dict, int s, const GraphBuildOptions& opt) {
  const int n = dict.n(), m = dict.m();
  if (s < 0 || s >= n) throw std::invalid_argument("graph support size must satisfy s < n");
  double count = 0.0;
  for (int k = 0; k <= s; ++k) count += binomial(m, k);
  if (count > opt.guard) {
    std::ostringstream os;
    os << "combinatorial explosion: " << count << " candidate supports exceed the guard " << opt.guard;
    throw CombinatorialExplosion(os.str());
  }

  DependencyGraph g;
  g.n = n;
  g.m = m;
  g.s = s;
  g.nodes.push_back({});
  for (int k = 1; k <= s; ++k)
    for_each_subset(m, k, [&](const std::vector<int>& sub) {
      if (rank(dict.columns(sub)) == k) g.nodes.push_back(sub);
      return true;
    });

  const Matrix& D = dict.atoms();
  std::vector<Matrix> bottom, top;
  for (const auto& node : g.nodes) {
    const Matrix Ds = select_columns(D, node);
    bottom.push_back(Ds.bottomRows(n - 1));
    top.push_back(Ds.topRows(n - 1));
  }
  const auto V = static_cast<int>(g.nodes.size());
  for (int a = 0; a < V; ++a) {
    for (int b = 0; b < V; ++b) {
      const int na = static_cast<int>(g.nodes[static_cast<std::size_t>(a)].size());
      const int nb = static_cast<int>(g.nodes[static_cast<std::size_t>(b)].size());
      if (na + nb == 0) {
        g.edges.emplace_back(a, b);  // (empty, empty) by convention
        continue;
      }
      Matrix pair(n - 1, na + nb);
      pair.leftCols(na) = bottom[static_cast<std::size_t>(a)];
      pair.rightCols(nb) = -top[static_cast<std::size_t>(b)];
      const int bound = opt.min_rule ? std::min(n - 1, na + nb) : na + nb;
      if (rank(pair, opt.tol) < bound) g.edges.emplace_back(a, b);
    }
  }
  return g;
}

PathEnumeration enumerate_paths(const DependencyGraph& g, int P, std::size_t cap, bool closed) {
  if (P < 1) throw std::invalid_argument("path length must be at least 1");
  PathEnumeration out;
  const auto succ = g.successors();
  const auto V = static_cast<int>(g.nodes.size());

  auto reach_layers = [&](int target) {
    // layer[l][v]: v reaches `target` (or, when target < 0, anywhere) in exactly l edges
    std::vector<std::vector<char>> layer(static_cast<std::size_t>(P) + 1, std::vector<char>(static_cast<std::size_t>(V), 0));
    for (int v = 0; v < V; ++v) layer[0][static_cast<std::size_t>(v)] = (target < 0 || v == target) ? 1 : 0;
    for (int l = 1; l <= P; ++l)
      for (int v = 0; v < V; ++v)
        for (int w : succ[static_cast<std::size_t>(v)])
          if (layer[static_cast<std::size_t>(l - 1)][static_cast<std::size_t>(w)]) {
            layer[static_cast<std::size_t>(l)][static_cast<std::size_t>(v)] = 1;
            break;
          }
    return layer;
  };

  std::vector<std::vector<char>> open_layers;
  if (!closed) open_layers = reach_layers(-1);

  std::vector<int> walk;
  bool stop = false;
  for (int start = 0; start < V && !stop; ++start) {
    const auto layers = closed ? reach_layers(start) : open_layers;
    // node at position d (1-based) must reach the start in P-d+1 edges (closed)
    // or have some continuation of P-d edges (open)
    auto ok = [&](int v, int d) {
      const int need = closed ? P - d + 1 : P - d;
      return layers[static_cast<std::size_t>(need)][static_cast<std::size_t>(v)] != 0;
    };
    if (!ok(start, 1)) continue;
    walk.assign(1, start);
    std::function<void()> dfs = [&]() {
      if (stop) return;
      const int d = static_cast<int>(walk.size());
      if (d == P) {
        if (std::all_of(walk.begin(), walk.end(), [&](int v) { return g.nodes[static_cast<std::size_t>(v)].empty(); }))
          return;
        if (out.node_paths.size() >= cap) {
          out.truncated = true;
          stop = true;
          return;
        }
        out.node_paths.push_back(walk);
        return;
      }
      for (int w : succ[static_cast<std::size_t>(walk.back())]) {
        if (!ok(w, d + 1)) continue;
        walk.push_back(w);
        dfs();
        walk.pop_back();
        if (stop) return;
      }
    };
    dfs();
  }
  out.paths.reserve(out.node_paths.size());
  for (const auto& np : out.node_paths) out.paths.push_back(path_supports(g, np));
  return out;
}

SupportSequence path_supports(const DependencyGraph& g, const std::vector<int>& node_path) {
  std::vector<std::vector<int>> sup;
  sup.reserve(node_path.size());
  for (int v : node_path) sup.push_back(g.nodes.at(static_cast<std::size_t>(v)));
  return SupportSequence(std::move(sup), g.m);
}

Realizability is_realizable(const SupportSequence& S, const Dictionary& dict, int N, double tol) {
  const Kernel k = kernel(build_A_S(dict, S, N, tol), tol);
  return {k.dim > 0, k.dim};
}

SampledSignal sample_signal(const SupportSequence& S, const Dictionary& dict, int N, Rng& rng, double tol) {
  const Kernel k = kernel(build_A_S(dict, S, N, tol), tol);
  if (k.dim == 0) throw UnrealizableSupport("support sequence is not realizable: ker A_S = {0}");
  Vector c(k.dim);
  for (int i = 0; i < k.dim; ++i) c(i) = rng.normal();
  Signal x = k.basis * (c / c.norm());
  GlobalRep gamma = codes_on_support(dict, S, x);
  return {std::move(x), std::move(gamma)};
}

Dictionary realize_graph(const DependencyGraph& g, int n, const RealizeOptions& opt) {
  const int m = g.m;
  if (n < 2 || m < 1) throw std::invalid_argument("realization needs n >= 2 and m >= 1");
  int k = -1;
  for (const auto& node : g.nodes) {
    if (node.empty()) continue;
    if (k < 0) k = static_cast<int>(node.size());
    if (static_cast<int>(node.size()) != k) throw Unsupported("graph realization needs all nodes of equal size");
    for (int j : node)
      if (j < 0 || j >= m) throw DimensionError("node index outside [0, m)");
  }
  if (k < 1) throw Unsupported("graph has no non-empty nodes");

  std::vector<Eigen::Triplet<double>> rows;
  int row = 0;
  auto var = [n](int t, int j) { return j * n + t; };
  for (const auto& [a, b] : g.edges) {
    const auto& sa = g.nodes.at(static_cast<std::size_t>(a));
    const auto& sb = g.nodes.at(static_cast<std::size_t>(b));
    if (sa.empty() && sb.empty()) continue;
    const auto it = g.transfer.find({a, b});
    if (it == g.transfer.end()) throw Unsupported("every non-empty edge needs a transfer matrix");
    const Matrix& C = it->second;
    if (C.rows() != k || C.cols() != k) throw DimensionError("transfer matrices must be k x k");
    for (int c = 0; c < k; ++c)
      for (int t = 0; t < n - 1; ++t, ++row) {
        rows.emplace_back(row, var(t + 1, sa[static_cast<std::size_t>(c)]), 1.0);
        for (int q = 0; q < k; ++q)
          if (C(q, c) != 0.0) rows.emplace_back(row, var(t, sb[static_cast<std::size_t>(q)]), -C(q, c));
      }
  }
  Matrix system = Matrix::Zero(row, n * m);
  for (const auto& tr : rows) system(tr.row(), tr.col()) += tr.value();

  const Kernel ker = kernel(system, opt.tol);
  if (ker.dim == 0) throw ConstructionError("no nontrivial realization: the edge equations force D = 0");
  Rng rng(opt.seed);
  Vector c(ker.dim);
  for (int i = 0; i < ker.dim; ++i) c(i) = rng.normal();
  Vector v = ker.basis * c;
  v /= v.norm();
  Dictionary dict(Eigen::Map<const Matrix>(v.data(), n, m), DictionaryKind::graph_realized, false);

  if (opt.verify) {
    const DependencyGraph realized = build_graph(dict, k);
    for (const auto& [a, b] : g.edges) {
      if (!realized.has_edge(g.nodes[static_cast<std::size_t>(a)], g.nodes[static_cast<std::size_t>(b)]))
        throw ConstructionError("realized dictionary lost an input edge");
    }
  }
  return dict;
}

DependencyGraph transfer_subgraph(const Dictionary& dict, const DependencyGraph& g, int k, double tol) {
  const int n = dict.n();
  DependencyGraph out;
  out.n = g.n;
  out.m = g.m;
  out.s = k;
  out.nodes.push_back({});
  std::vector<int> remap(g.nodes.size(), -1);
  remap[0] = 0;
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    if (static_cast<int>(g.nodes[v].size()) != k) continue;
    remap[v] = static_cast<int>(out.nodes.size());
    out.nodes.push_back(g.nodes[v]);
  }
  for (const auto& [a, b] : g.edges) {
    const int ra = remap[static_cast<std::size_t>(a)], rb = remap[static_cast<std::size_t>(b)];
    if (ra < 0 || rb < 0) continue;
    if (ra == 0 && rb == 0) {
      out.edges.emplace_back(0, 0);
      continue;
    }
    if (ra == 0 || rb == 0) continue;
    const Matrix A = dict.columns(g.nodes[static_cast<std::size_t>(a)]).bottomRows(n - 1);
    const Matrix B = dict.columns(g.nodes[static_cast<std::size_t>(b)]).topRows(n - 1);
    if (rank(A) != k || rank(B) != k) continue;
    const Matrix C = B.colPivHouseholderQr().solve(A);
    if ((B * C - A).norm() > tol * std::max(1.0, A.norm())) continue;
    out.edges.emplace_back(ra, rb);
    out.transfer[{ra, rb}] = C;
  }
  return out;
}

int dim_bound_transfer(const SupportSequence& S, const DependencyGraph& g) {
  if (!g.transfer_mode()) throw Unsupported("dimension bound needs a graph with transfer matrices");
  int k = -1;
  for (int i = 0; i < S.P(); ++i) {
    if (S[i].empty()) continue;
    if (k < 0) k = static_cast<int>(S[i].size());
    if (static_cast<int>(S[i].size()) != k || g.node_index(S[i]) < 0)
      throw Unsupported("path leaves the transfer-mode node set");
  }
  if (k < 0) throw Unsupported("path visits only the empty support; the bound is vacuous");
  for (int i = 0; i < S.P(); ++i) {
    const auto& a = S[i];
    const auto& b = S[(i + 1) % S.P()];
    if (a.empty() || b.empty()) throw Unsupported("transfer-mode paths cannot pass through the empty support");
    if (!g.transfer.contains({g.node_index(a), g.node_index(b)})) throw Unsupported("path uses an edge without a transfer matrix");
  }
  return k;
}

int conjectured_dim_bound(const SupportSequence& S, const Dictionary& dict, double tol) {
  const int n = dict.n();
  int bound = S.P() > 0 ? static_cast<int>(S[0].size()) : 0;
  for (int i = 0; i + 1 < S.P(); ++i) {
    const Matrix A = dict.columns(S[i]);
    const Matrix B = dict.columns(S[i + 1]);
    Matrix pair(n - 1, A.cols() + B.cols());
    pair << A.bottomRows(n - 1), B.topRows(n - 1);
    bound += static_cast<int>(B.cols()) - rank(pair, tol);
  }
  return bound;
}

}  // namespace patchsparse
