#pragma once

#include "patchsparse/linalg.hpp"

#include <Eigen/SparseCore>

#include <string>
#include <vector>

namespace patchsparse {

/// A signal of length N, periodically extended.
using Signal = Vector;

enum class DictionaryKind { heaviside, signature, multi_signature, graph_realized, custom };

std::string to_string(DictionaryKind kind);
DictionaryKind dictionary_kind_from_string(const std::string& name);

/// Local dictionary D (n x m); column j is atom d_j.
class Dictionary {
 public:
  Dictionary() = default;
  Dictionary(Matrix atoms, DictionaryKind kind, bool normalized = false);

  int n() const { return static_cast<int>(atoms_.rows()); }
  int m() const { return static_cast<int>(atoms_.cols()); }
  const Matrix& atoms() const { return atoms_; }
  auto atom(int j) const { return atoms_.col(j); }
  DictionaryKind kind() const { return kind_; }
  bool normalized() const { return normalized_; }

  /// Column norms before normalization, when the constructor normalized the
  /// atoms itself (empty otherwise). Unnormalized atom j = scale[j] * d_j.
  const Vector& scales() const { return scales_; }
  void set_scales(Vector scales);

  Matrix columns(const std::vector<int>& idx) const { return select_columns(atoms_, idx); }

 private:
  Matrix atoms_;
  DictionaryKind kind_ = DictionaryKind::custom;
  bool normalized_ = false;
  Vector scales_;
};

/// The tuple (D, s, N, P) of the globalized local-sparse model; P = N.
class PatchModel {
 public:
  PatchModel(Dictionary dict, int s, int N);

  const Dictionary& dict() const { return dict_; }
  int s() const { return s_; }
  int N() const { return N_; }
  int P() const { return N_; }
  int n() const { return dict_.n(); }
  int m() const { return dict_.m(); }

 private:
  Dictionary dict_;
  int s_;
  int N_;
};

/// Per-patch codes alpha_i stacked as the columns of an m x P matrix.
class GlobalRep {
 public:
  GlobalRep() = default;
  GlobalRep(int m, int P) : blocks_(Matrix::Zero(m, P)) {}
  explicit GlobalRep(Matrix blocks) : blocks_(std::move(blocks)) {}

  static GlobalRep from_flat(const Vector& gamma, int m);

  int m() const { return static_cast<int>(blocks_.rows()); }
  int P() const { return static_cast<int>(blocks_.cols()); }
  auto block(int i) { return blocks_.col(i); }
  auto block(int i) const { return blocks_.col(i); }
  const Matrix& blocks() const { return blocks_; }

  /// Gamma as one vector of length m*P, block i at [i*m, (i+1)*m).
  Vector flat() const;

  /// max_i ||alpha_i||_0, counting entries with |a| > tol.
  int l0inf(double tol = 0.0) const;

 private:
  Matrix blocks_;
};

/// One index set per patch (0-based atom indices, sorted, may be empty).
class SupportSequence {
 public:
  SupportSequence() = default;
  SupportSequence(std::vector<std::vector<int>> supports, int m);

  /// Supports of the nonzero entries of each block (|a| > tol).
  static SupportSequence of(const GlobalRep& gamma, double tol = 0.0);

  int P() const { return static_cast<int>(supports_.size()); }
  int m() const { return m_; }
  const std::vector<int>& operator[](int i) const { return supports_[static_cast<std::size_t>(i)]; }
  const std::vector<std::vector<int>>& supports() const { return supports_; }
  int max_size() const;
  int total_size() const;

  bool operator==(const SupportSequence& other) const = default;

 private:
  std::vector<std::vector<int>> supports_;
  int m_ = 0;
};

/// (x[i], x[i+1], ..., x[i+n-1]) with indices mod N.
Vector extract_patch(const Signal& x, int i, int n);

/// Adjoint of extract_patch: p placed at i..i+n-1 (mod N), zeros elsewhere.
Signal embed_patch(const Vector& p, int i, int N);

enum class ShiftKind { S_T, S_B, Z_T, Z_B, W_T, W_B };

/// Top/bottom extraction operators with k shifts and their n x n extensions.
/// S_T, S_B are (n-k) x n; Z_*, W_* are n x n.
Matrix shift_op(ShiftKind kind, int k, int n);

/// Dense global matrices of the model.
struct OperatorBundle {
  Matrix DG;     // N x mP
  Matrix M;      // nP x mP
  Matrix Mstar;  // (n-1)P x mP
  int n = 0, m = 0, N = 0, P = 0;
};

OperatorBundle build_bundle(const PatchModel& model);
OperatorBundle build_bundle(const Dictionary& dict, int N);

/// Q_beta = [D_G; beta * M_star] in sparse storage.
Eigen::SparseMatrix<double> sparse_qbeta(const Dictionary& dict, int N, double beta);

/// x = D_G Gamma = (1/n) sum_i R_i^T D alpha_i.
Signal synthesize(const Dictionary& dict, const GlobalRep& gamma);

/// max_i ||S_B D alpha_i - S_T D alpha_{i+1}||_inf, i.e. ||M_star Gamma||_inf.
double overlap_violation(const Dictionary& dict, const GlobalRep& gamma);

/// True iff every pair of consecutive patch estimates agrees on its overlap.
bool check_overlap_agreement(const GlobalRep& gamma, const Dictionary& dict, double tol);

/// Orthogonal projector onto span D_s (zero map for the empty set).
Matrix patch_projector(const Dictionary& dict, const std::vector<int>& support, double tol = kRankTol);

/// A_S: block-row i = (I_n - P_{s_i}) R_i. Throws NonMinimalSupport.
Matrix build_A_S(const Dictionary& dict, const SupportSequence& S, int N, double tol = kRankTol);

/// M_A = (1/n) sum_i R_i^T P_{s_i} R_i, the linear part of patch averaging.
Matrix averaging_operator(const Dictionary& dict, const SupportSequence& S, int N, double tol = kRankTol);

/// Per-patch least squares codes on the given supports.
GlobalRep codes_on_support(const Dictionary& dict, const SupportSequence& S, const Signal& x);

/// M_star restricted to the columns in S (each block keeps only its support).
Matrix restricted_mstar(const Dictionary& dict, const SupportSequence& S);

}  // namespace patchsparse
