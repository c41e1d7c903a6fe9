#pragma once

#include "patchsparse/core.hpp"
#include "patchsparse/rng.hpp"

#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace patchsparse {

/// Support-dependency graph. Node 0 is always the empty support; edges are
/// ordered pairs of node indices. In transfer mode every non-empty edge (a, b)
/// carries C with S_B D_{s_a} = S_T D_{s_b} C.
struct DependencyGraph {
  std::vector<std::vector<int>> nodes;
  std::vector<std::pair<int, int>> edges;
  std::map<std::pair<int, int>, Matrix> transfer;
  int n = 0;
  int m = 0;
  int s = 0;

  int node_index(const std::vector<int>& support) const;  // -1 when absent
  bool has_edge(int a, int b) const;
  bool has_edge(const std::vector<int>& a, const std::vector<int>& b) const;
  std::vector<std::vector<int>> successors() const;
  bool transfer_mode() const { return !transfer.empty(); }
};

struct GraphBuildOptions {
  double tol = kRankTol;
  double guard = 1e6;  // bound on the number of enumerated supports
  // Cap the rank bound at n-1. Pairs with |a|+|b| > n-1 always admit
  // overlap-consistent codes, so this drops edges real signals use.
  bool min_rule = false;
};

/// Enumerates every support of size <= s with full column rank as a node and
/// keeps (a, b) when [S_B D_a, -S_T D_b] has a kernel, i.e.
/// rank < |a|+|b| (rank < min(n-1, |a|+|b|) with min_rule).
DependencyGraph build_graph(const Dictionary& dict, int s, const GraphBuildOptions& opt = {});

struct PathEnumeration {
  std::vector<SupportSequence> paths;
  std::vector<std::vector<int>> node_paths;
  bool truncated = false;
};

/// Walks of P nodes (closed: the last node connects back to the first),
/// excluding the all-empty walk, in lexicographic node order.
PathEnumeration enumerate_paths(const DependencyGraph& g, int P, std::size_t cap = 100000, bool closed = true);

struct Realizability {
  bool realizable = false;
  int dim = 0;
};

Realizability is_realizable(const SupportSequence& S, const Dictionary& dict, int N, double tol = kRankTol);

struct SampledSignal {
  Signal x;
  GlobalRep gamma;
};

/// Uniform draw on the unit sphere of ker A_S and its per-patch codes.
SampledSignal sample_signal(const SupportSequence& S, const Dictionary& dict, int N, Rng& rng,
                            double tol = kRankTol);

struct RealizeOptions {
  std::uint64_t seed = 0;
  double tol = kRankTol;
  bool verify = true;
};

/// Solves S_B D_{s_a} = S_T D_{s_b} C_ab for D over every edge and returns a
/// random unit-Frobenius element of the solution space. `g.m` fixes the atom
/// count; nodes must all have size k and every non-empty edge a transfer.
Dictionary realize_graph(const DependencyGraph& g, int n, const RealizeOptions& opt = {});

/// Nodes of size k whose edges satisfy span S_B D_a = span S_T D_b, with the
/// transfer matrices recovered by least squares.
DependencyGraph transfer_subgraph(const Dictionary& dict, const DependencyGraph& g, int k, double tol = 1e-8);

/// Certified bound dim ker A_S <= k for a path of a transfer-mode graph.
int dim_bound_transfer(const SupportSequence& S, const DependencyGraph& g);

/// |s_1| + sum_i (|s_{i+1}| - rank[S_B D_{s_i}  S_T D_{s_{i+1}}]). Diagnostic
/// only; not a proven bound outside transfer mode.
int conjectured_dim_bound(const SupportSequence& S, const Dictionary& dict, double tol = kRankTol);

/// Support sequence for a node-index path.
SupportSequence path_supports(const DependencyGraph& g, const std::vector<int>& node_path);

}  // namespace patchsparse
