#include "patchsparse/measures.hpp"

#include "patchsparse/combinatorics.hpp"
#include "patchsparse/errors.hpp"
#include "patchsparse/graphmodel.hpp"
#include "patchsparse/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace patchsparse {

namespace {

// Absolute Gram matrix of the unit-normalized atoms.
Matrix abs_gram(const Matrix& atoms) {
  Matrix U = atoms;
  for (int j = 0; j < U.cols(); ++j) {
    const double nrm = U.col(j).norm();
    if (nrm == 0.0) throw DomainError("zero atom: coherence is undefined");
    U.col(j) /= nrm;
  }
  return (U.transpose() * U).cwiseAbs();
}

Matrix unit_atoms(const Matrix& atoms) {
  Matrix U = atoms;
  for (int j = 0; j < U.cols(); ++j) {
    const double nrm = U.col(j).norm();
    if (nrm == 0.0) throw DomainError("zero atom: cannot normalize");
    U.col(j) /= nrm;
  }
  return U;
}

std::vector<int> set_union(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> u;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
  return u;
}

// max_{j in S} sum_{k in S\{j}} G(j, k)
double in_support_term(const Matrix& G, const std::vector<int>& S) {
  double best = 0.0;
  for (int j : S) {
    double acc = 0.0;
    for (int k : S)
      if (k != j) acc += G(j, k);
    best = std::max(best, acc);
  }
  return best;
}

// Rayleigh extremes of the Gram of `a`: (lambda_min, lambda_max).
std::pair<double, double> gram_extremes(const Matrix& a) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(a.transpose() * a, Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(es.eigenvalues().size() - 1)};
}

double isometry_gap(std::pair<double, double> ext) { return std::max(1.0 - ext.first, ext.second - 1.0); }

}  // namespace

std::vector<std::vector<int>> AllowedSupports::pairwise_unions(std::size_t cap) const {
  std::set<std::vector<int>> out;
  for (std::size_t a = 0; a < T.size(); ++a)
    for (std::size_t b = a; b < T.size(); ++b) {
      out.insert(set_union(T[a], T[b]));
      if (out.size() > cap) throw CombinatorialExplosion("T|T exceeds the size cap");
    }
  return {out.begin(), out.end()};
}

AllowedSupports all_supports_up_to(int m, int s) {
  AllowedSupports T;
  T.source = AllowedSupports::Source::exhaustive_enumeration;
  T.exact = true;
  for (int k = 0; k <= std::min(s, m); ++k)
    for_each_subset(m, k, [&](const std::vector<int>& sub) {
      T.T.push_back(sub);
      return true;
    });
  return T;
}

AllowedSupports allowed_supports(const PatchModel& model, std::size_t cap, std::uint64_t seed) {
  const Dictionary& dict = model.dict();
  const int N = model.N();
  const DependencyGraph g = build_graph(dict, model.s());
  const PathEnumeration walks = enumerate_paths(g, N, cap, true);
  std::set<std::vector<int>> found{std::vector<int>{}};
  Rng rng(seed, 0x616c6c6f77ULL);
  for (const auto& S : walks.paths) {
    const Kernel ker = kernel(build_A_S(dict, S, N));
    if (ker.dim == 0) continue;
    Vector c(ker.dim);
    for (int t = 0; t < ker.dim; ++t) c(t) = rng.normal();
    const Signal x = ker.basis * c;
    const GlobalRep gamma = codes_on_support(dict, S, x);
    const double scale = gamma.blocks().cwiseAbs().maxCoeff();
    const SupportSequence actual = SupportSequence::of(gamma, 1e-9 * scale);
    for (int i = 0; i < actual.P(); ++i) found.insert(actual[i]);
  }
  AllowedSupports T;
  T.T.assign(found.begin(), found.end());
  std::stable_sort(T.T.begin(), T.T.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  T.source = AllowedSupports::Source::exhaustive_enumeration;
  T.exact = !walks.truncated;
  return T;
}

MeasureResult spark(const Dictionary& dict, double cap) {
  const int n = dict.n(), m = dict.m();
  const Matrix U = unit_atoms(dict.atoms());
  MeasureResult res;
  double spent = 0.0;
  for (int k = 1; k <= std::min(n, m); ++k) {
    spent += binomial(m, k);
    if (spent > cap) {
      res.value = k;  // no dependent subset of size < k
      res.exact = false;
      return res;
    }
    std::vector<int> witness;
    for_each_subset(m, k, [&](const std::vector<int>& sub) {
      if (rank(select_columns(U, sub)) < k) {
        witness = sub;
        return false;
      }
      return true;
    });
    if (!witness.empty()) {
      res.value = k;
      res.witness = {witness};
      return res;
    }
  }
  res.value = n + 1;
  return res;
}

MeasureResult globalized_spark(const Dictionary& dict, const AllowedSupports& T, double cap) {
  const Matrix U = unit_atoms(dict.atoms());
  std::vector<std::vector<int>> unions = T.pairwise_unions(static_cast<std::size_t>(cap));
  std::stable_sort(unions.begin(), unions.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  MeasureResult res;
  res.exact = T.exact;
  res.value = std::max(dict.n(), dict.m()) + 1;
  for (const auto& u : unions) {
    if (u.empty()) continue;
    if (rank(select_columns(U, u)) < static_cast<int>(u.size())) {
      res.value = static_cast<double>(u.size());
      res.witness = {u};
      break;
    }
  }
  return res;
}

MeasureResult babel_mu1(const Dictionary& dict, int s) {
  const int m = dict.m();
  if (s < 0 || s > m - 1) throw DimensionError("babel function order must lie in [0, m-1]");
  for (int j = 0; j < m; ++j)
    if (std::abs(dict.atoms().col(j).norm() - 1.0) > 1e-8)
      throw DomainError("babel function requires unit-norm atoms");
  const Matrix G = (dict.atoms().transpose() * dict.atoms()).cwiseAbs();
  MeasureResult res;
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<double, int>> row;
    for (int j = 0; j < m; ++j)
      if (j != i) row.emplace_back(G(i, j), j);
    std::stable_sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double acc = 0.0;
    std::vector<int> w{i};
    for (int t = 0; t < s; ++t) {
      acc += row[static_cast<std::size_t>(t)].first;
      w.push_back(row[static_cast<std::size_t>(t)].second);
    }
    if (i == 0 || acc > res.value) {
      res.value = acc;
      res.witness = {w};
    }
  }
  return res;
}

MeasureResult globalized_mu1star(const Dictionary& dict, const AllowedSupports& T, int s) {
  const Matrix G = abs_gram(dict.atoms());
  MeasureResult res;
  res.exact = T.exact;
  bool any = false;
  for (const auto& S : T.pairwise_unions()) {
    if (static_cast<int>(S.size()) != s) continue;
    const double v = in_support_term(G, S);
    if (!any || v > res.value) {
      res.value = v;
      res.witness = {S};
    }
    any = true;
  }
  if (!any) throw DomainError("globalized coherence undefined: no support of size " + std::to_string(s) + " in T|T");
  return res;
}

MeasureResult eta1star(const Dictionary& dict, const AllowedSupports& T, int s) {
  const Matrix G = abs_gram(dict.atoms());
  const int m = dict.m();
  MeasureResult res;
  res.exact = T.exact;
  bool any = false;
  for (const auto& S : T.T) {
    if (S.empty() || static_cast<int>(S.size()) > s) continue;
    double cross = 0.0;
    for (int j = 0; j < m; ++j) {
      if (std::binary_search(S.begin(), S.end(), j)) continue;
      double acc = 0.0;
      for (int k : S) acc += G(k, j);
      cross = std::max(cross, acc);
    }
    const double v = in_support_term(G, S) + cross;
    if (!any || v > res.value) {
      res.value = v;
      res.witness = {S};
    }
    any = true;
  }
  if (!any) throw DomainError("modified coherence undefined: T holds no non-empty support of size <= s");
  return res;
}

std::string to_string(RipVariant v) {
  switch (v) {
    case RipVariant::classical: return "classical";
    case RipVariant::globalized: return "globalized";
    case RipVariant::generalized: return "generalized";
  }
  return "unknown";
}

RipVariant rip_variant_from_string(const std::string& name) {
  if (name == "classical") return RipVariant::classical;
  if (name == "globalized") return RipVariant::globalized;
  if (name == "generalized") return RipVariant::generalized;
  throw DimensionError("unknown RIP variant: " + name);
}

MeasureResult rip_classical(const Dictionary& dict, int k, double cap) {
  const int m = dict.m();
  if (k < 1 || k > m) throw DimensionError("RIP order must lie in [1, m]");
  if (binomial(m, k) > cap) throw CombinatorialExplosion("RIP brute force exceeds the subset cap");
  const Matrix U = unit_atoms(dict.atoms());
  MeasureResult res;
  for_each_subset(m, k, [&](const std::vector<int>& sub) {
    const double d = isometry_gap(gram_extremes(select_columns(U, sub)));
    if (res.witness.empty() || d > res.value) {
      res.value = d;
      res.witness = {sub};
    }
    return true;
  });
  return res;
}

MeasureResult rip_globalized(const Dictionary& dict, const AllowedSupports& T, int k) {
  if (k < 1) throw DimensionError("RIP order must be positive");
  const Matrix U = unit_atoms(dict.atoms());
  MeasureResult res;
  res.exact = T.exact;
  for (const auto& S : T.T) {
    if (S.empty() || static_cast<int>(S.size()) > k) continue;
    const double d = isometry_gap(gram_extremes(select_columns(U, S)));
    if (res.witness.empty() || d > res.value) {
      res.value = d;
      res.witness = {S};
    }
  }
  return res;
}

MeasureResult rip_generalized(const Dictionary& dict, int N, int k, double cap) {
  const int m = dict.m();
  if (k < 1) throw DimensionError("RIP order must be positive");
  if (N < dict.n()) throw DimensionError("signal length must be at least the patch length");
  const int kk = std::min(k, m);
  std::vector<std::vector<int>> subsets;
  for_each_subset(m, kk, [&](const std::vector<int>& sub) {
    subsets.push_back(sub);
    return true;
  });
  if (std::pow(static_cast<double>(subsets.size()), N) > cap)
    throw CombinatorialExplosion("generalized RIP pattern count exceeds the cap");

  const Dictionary unit(unit_atoms(dict.atoms()), DictionaryKind::custom, true);
  const Matrix DG = build_bundle(unit, N).DG;
  MeasureResult res;
  bool any = false;
  std::vector<std::size_t> odo(static_cast<std::size_t>(N), 0);
  std::vector<std::vector<int>> pattern(static_cast<std::size_t>(N));
  while (true) {
    std::vector<int> cols;
    for (int i = 0; i < N; ++i) {
      pattern[i] = subsets[odo[i]];
      for (int j : pattern[i]) cols.push_back(i * m + j);
    }
    const SupportSequence S(pattern, m);
    const Kernel ker = kernel(restricted_mstar(unit, S));
    if (ker.dim > 0) {
      const double d = isometry_gap(gram_extremes(select_columns(DG, cols) * ker.basis));
      if (!any || d > res.value) {
        res.value = d;
        res.witness = pattern;
      }
      any = true;
    }
    int pos = N - 1;
    while (pos >= 0 && ++odo[static_cast<std::size_t>(pos)] == subsets.size()) odo[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  return res;
}

MeasureResult rip_constants(const Dictionary& dict, int k, RipVariant variant, const AllowedSupports* T, int N,
                            double cap) {
  switch (variant) {
    case RipVariant::classical: return rip_classical(dict, k, cap);
    case RipVariant::globalized:
      if (!T) throw DimensionError("globalized RIP needs the allowed supports");
      return rip_globalized(dict, *T, k);
    case RipVariant::generalized:
      if (N <= 0) throw DimensionError("generalized RIP needs the signal length N");
      return rip_generalized(dict, N, k, cap);
  }
  throw DimensionError("unknown RIP variant");
}

int spark_coherence_bound(const Dictionary& dict) {
  const int m = dict.m();
  const Dictionary unit(unit_atoms(dict.atoms()), DictionaryKind::custom, true);
  for (int s = 2; s <= m; ++s)
    if (babel_mu1(unit, s - 1).value >= 1.0) return s;
  return m + 1;
}

int globalized_spark_coherence_bound(const Dictionary& dict, const AllowedSupports& T) {
  const Matrix G = abs_gram(dict.atoms());
  int best = std::max(dict.n(), dict.m()) + 1;
  for (const auto& S : T.pairwise_unions()) {
    const int s = static_cast<int>(S.size());
    if (s >= 1 && s < best && in_support_term(G, S) >= 1.0) best = s;
  }
  return best;
}

int uniqueness_sparsity(double sigma_star) {
  // largest integer s with 2s < sigma_star
  return static_cast<int>(std::ceil(sigma_star / 2.0)) - 1;
}

double rip_stability_bound(double eps, double delta) {
  if (!(delta < 1.0)) throw DomainError("stability bound requires delta < 1");
  return 4.0 * eps * eps / (1.0 - delta);
}

}  // namespace patchsparse
