#pragma once

#include "patchsparse/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace patchsparse {

/// A measure value with its exactness flag and the extremal subset(s).
struct MeasureResult {
  double value = 0.0;
  bool exact = true;  // false: value is a certified bound, not the exact value
  std::vector<std::vector<int>> witness;
};

/// The set T of allowed local supports (sorted, deduplicated; includes the
/// empty support).
struct AllowedSupports {
  enum class Source { exhaustive_enumeration, graph_paths };
  std::vector<std::vector<int>> T;
  Source source = Source::exhaustive_enumeration;
  bool exact = false;

  /// T union T: every s1 | s2 for s1, s2 in T, deduplicated.
  std::vector<std::vector<int>> pairwise_unions(std::size_t cap = 1000000) const;
};

/// Everything of size <= s (the unconstrained local model).
AllowedSupports all_supports_up_to(int m, int s);

/// Supports occurring along realizable closed walks of the dependency graph.
/// Each realizable walk contributes the exact supports of a generic signal in
/// its subspace. exact = true iff the enumeration was not truncated.
AllowedSupports allowed_supports(const PatchModel& model, std::size_t cap = 100000, std::uint64_t seed = 0);

/// Smallest number of linearly dependent columns; n+1 when no subset of size
/// <= n is dependent. Beyond the guard, a lower bound with exact = false.
MeasureResult spark(const Dictionary& dict, double cap = 1e6);

/// min |s1 | s2| over s1, s2 in T with rank-deficient D_{s1|s2}; max(n, m)+1
/// when none.
MeasureResult globalized_spark(const Dictionary& dict, const AllowedSupports& T, double cap = 1e6);

/// Babel function: max_i of the sum of the s largest |<d_i, d_j>|, j != i.
/// Requires unit-norm atoms; mu1(0) = 0.
MeasureResult babel_mu1(const Dictionary& dict, int s);

/// Globalized coherence: max over S in T|T with |S| = s of
/// max_{j in S} sum_{k in S\{j}} |<d_j, d_k>|. Throws DomainError when no such S.
MeasureResult globalized_mu1star(const Dictionary& dict, const AllowedSupports& T, int s);

/// Modified coherence: max over non-empty S in T with |S| <= s of
/// max_{j in S} sum_{k in S\{j}} |<d_k, d_j>| + max_{j not in S} sum_{k in S} |<d_k, d_j>|.
MeasureResult eta1star(const Dictionary& dict, const AllowedSupports& T, int s);

enum class RipVariant { classical, globalized, generalized };
std::string to_string(RipVariant v);
RipVariant rip_variant_from_string(const std::string& name);

/// max over size-k supports of max(1 - lambda_min, lambda_max - 1) of the Gram matrix.
MeasureResult rip_classical(const Dictionary& dict, int k, double cap = 1e6);

/// Same extremes over supports in T of size <= k.
MeasureResult rip_globalized(const Dictionary& dict, const AllowedSupports& T, int k);

/// Extremal Rayleigh quotients of ||D_G Gamma||^2 / ||Gamma||^2 over
/// {Gamma : M Gamma = 0, ||Gamma||_{0,inf} <= k} for signals of length N,
/// enumerating every per-patch support pattern. `cap` bounds the pattern count.
MeasureResult rip_generalized(const Dictionary& dict, int N, int k, double cap = 1e6);

/// Dispatcher; globalized needs T, generalized needs N.
MeasureResult rip_constants(const Dictionary& dict, int k, RipVariant variant,
                            const AllowedSupports* T = nullptr, int N = 0, double cap = 1e6);

/// min{s : mu1(s-1) >= 1}, a lower bound on the spark; m+1 when never reached.
int spark_coherence_bound(const Dictionary& dict);

/// min{s : mu1_star(s) >= 1} over the s where mu1_star is defined; the value
/// max(n, m)+1 when never reached.
int globalized_spark_coherence_bound(const Dictionary& dict, const AllowedSupports& T);

/// Largest s with s < sigma_star / 2 (the uniqueness regime).
int uniqueness_sparsity(double sigma_star);

/// 4 eps^2 / (1 - delta) for delta < 1; throws DomainError otherwise.
double rip_stability_bound(double eps, double delta);

}  // namespace patchsparse
