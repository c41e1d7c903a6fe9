#pragma once

#include "patchsparse/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace patchsparse {

/// Unnormalized upper-triangular Heaviside dictionary H_n: atom j has ones in
/// rows 0..j.
Dictionary heaviside(int n);

/// Unit-norm cyclic windows of a base signal: atom i = R_i x / ||R_i x||.
/// The base length is the atom count m.
Dictionary signature(const Vector& base, int n);

/// Cyclic windows of `base` before normalization (the Hankel-type matrix).
Matrix signature_windows(const Vector& base, int n);

/// Inputs to the multi-signature construction. `base` holds s base signals of
/// length r as columns (r x s); the dictionary has m = r*s atoms.
struct SignatureSpec {
  Matrix base;
  int n = 0;
  std::vector<Matrix> transfer;  // r nonsingular s x s mixing matrices; empty = identity
};

/// Atoms for block i are Y_i * M_i with Y_i the i-th cyclic patches of the
/// base signals, ordered block-major, then normalized (scales recorded).
Dictionary multi_signature(const SignatureSpec& spec);

/// Random multi-signature spec: i.i.d. standard normal base and transfers.
SignatureSpec random_multi_signature_spec(int n, int m, int s, std::uint64_t seed);

/// Largest |<d_i, d_j>| over i != j of the normalized atoms.
double mutual_coherence(const Matrix& atoms);

struct CoherenceOptimizerOptions {
  int iterations = 10000;
  double step = 0.01;
  int restarts = 1;
  std::uint64_t seed = 0;
  double temperature = 0.05;   // initial log-sum-exp temperature
  int anneal_every = 1000;     // temperature halves every this many iterations
  double target = 0.0;         // stop a restart once the coherence is <= target
};

struct CoherenceOptimizerResult {
  Vector base;
  Dictionary dict;
  double coherence = 1.0;
  std::vector<double> best_history;  // best-so-far coherence after each iteration (last restart)
};

/// Minimizes a smoothed maximum of pairwise |<d_i,d_j>| of the signature
/// dictionary built from the base signal, with Adam steps on the base.
CoherenceOptimizerResult optimize_signature_coherence(int n, int m, const CoherenceOptimizerOptions& opt);

/// Theta(D') = [Z_B^(n-1) D', ..., Z_B^(1) D', D', Z_T^(1) D', ..., Z_T^(n-1) D'].
Dictionary csc_pseudo_local(const Dictionary& dprime);

/// Scales every atom to unit l2 norm; throws on a zero atom.
Dictionary normalize_atoms(const Dictionary& dict);

/// A signal made of weighted cyclic shifts of a replicated signature base,
/// together with its support sequence and codes.
struct SignatureSignal {
  Signal x;
  SupportSequence support;
  GlobalRep gamma;
};

/// y = sum_j w_j shift(b, t_j) with b the base replicated to length N
/// (N must be a multiple of m). Patch i uses atoms {t_j + i mod m}.
SignatureSignal signature_signal(const Dictionary& dict, const Vector& base, int N,
                                 const std::vector<int>& shifts, const std::vector<double>& weights);

}  // namespace patchsparse
