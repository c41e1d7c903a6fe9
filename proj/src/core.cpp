#include "patchsparse/core.hpp"

#include "patchsparse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace patchsparse {

std::string to_string(DictionaryKind kind) {
  switch (kind) {
    case DictionaryKind::heaviside: return "heaviside";
    case DictionaryKind::signature: return "signature";
    case DictionaryKind::multi_signature: return "multi_signature";
    case DictionaryKind::graph_realized: return "graph_realized";
    case DictionaryKind::custom: return "custom";
  }
  return "custom";
}

DictionaryKind dictionary_kind_from_string(const std::string& name) {
  if (name == "heaviside") return DictionaryKind::heaviside;
  if (name == "signature") return DictionaryKind::signature;
  if (name == "multi_signature" || name == "multi") return DictionaryKind::multi_signature;
  if (name == "graph_realized" || name == "graph") return DictionaryKind::graph_realized;
  if (name == "custom") return DictionaryKind::custom;
  throw std::invalid_argument("unknown dictionary kind '" + name + "'");
}

Dictionary::Dictionary(Matrix atoms, DictionaryKind kind, bool normalized)
    : atoms_(std::move(atoms)), kind_(kind), normalized_(normalized) {
  if (atoms_.rows() < 2 || atoms_.cols() < 1)
    throw DimensionError("dictionary needs n >= 2 rows and m >= 1 columns");
  if (!atoms_.allFinite()) throw std::invalid_argument("dictionary entries must be finite");
  if (normalized_) {
    for (Eigen::Index j = 0; j < atoms_.cols(); ++j) {
      if (std::abs(atoms_.col(j).norm() - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "atom " << j << " is flagged normalized but has norm " << atoms_.col(j).norm();
        throw std::invalid_argument(os.str());
      }
    }
  }
}

void Dictionary::set_scales(Vector scales) {
  if (scales.size() != 0 && scales.size() != atoms_.cols())
    throw DimensionError("scale vector length must equal the atom count");
  scales_ = std::move(scales);
}

PatchModel::PatchModel(Dictionary dict, int s, int N) : dict_(std::move(dict)), s_(s), N_(N) {
  if (s_ < 1 || s_ >= dict_.n()) throw std::invalid_argument("local sparsity must satisfy 1 <= s < n");
  if (N_ < dict_.n()) throw DimensionError("signal length N must be at least the patch length n");
}

GlobalRep GlobalRep::from_flat(const Vector& gamma, int m) {
  if (m <= 0 || gamma.size() % m != 0) throw DimensionError("flat representation length is not a multiple of m");
  const auto P = gamma.size() / m;
  return GlobalRep(Eigen::Map<const Matrix>(gamma.data(), m, P));
}

Vector GlobalRep::flat() const {
  return Eigen::Map<const Vector>(blocks_.data(), blocks_.size());
}

int GlobalRep::l0inf(double tol) const {
  int best = 0;
  for (Eigen::Index i = 0; i < blocks_.cols(); ++i)
    best = std::max(best, static_cast<int>((blocks_.col(i).array().abs() > tol).count()));
  return best;
}

SupportSequence::SupportSequence(std::vector<std::vector<int>> supports, int m)
    : supports_(std::move(supports)), m_(m) {
  for (auto& s : supports_) {
    std::sort(s.begin(), s.end());
    if (std::adjacent_find(s.begin(), s.end()) != s.end())
      throw std::invalid_argument("support set contains a repeated index");
    for (int j : s)
      if (j < 0 || j >= m_) throw DimensionError("support index out of range [0, m)");
  }
}

SupportSequence SupportSequence::of(const GlobalRep& gamma, double tol) {
  std::vector<std::vector<int>> sup(static_cast<std::size_t>(gamma.P()));
  for (int i = 0; i < gamma.P(); ++i)
    for (int j = 0; j < gamma.m(); ++j)
      if (std::abs(gamma.block(i)(j)) > tol) sup[static_cast<std::size_t>(i)].push_back(j);
  return SupportSequence(std::move(sup), gamma.m());
}

int SupportSequence::max_size() const {
  std::size_t best = 0;
  for (const auto& s : supports_) best = std::max(best, s.size());
  return static_cast<int>(best);
}

int SupportSequence::total_size() const {
  std::size_t t = 0;
  for (const auto& s : supports_) t += s.size();
  return static_cast<int>(t);
}

Vector extract_patch(const Signal& x, int i, int n) {
  const auto N = static_cast<int>(x.size());
  if (n > N) throw DimensionError("patch length exceeds signal length");
  if (i < 0 || i >= N) throw DimensionError("patch index out of range");
  Vector p(n);
  for (int t = 0; t < n; ++t) p(t) = x((i + t) % N);
  return p;
}

Signal embed_patch(const Vector& p, int i, int N) {
  const auto n = static_cast<int>(p.size());
  if (n > N) throw DimensionError("patch length exceeds signal length");
  if (i < 0 || i >= N) throw DimensionError("patch index out of range");
  Signal x = Signal::Zero(N);
  for (int t = 0; t < n; ++t) x((i + t) % N) += p(t);
  return x;
}

Matrix shift_op(ShiftKind kind, int k, int n) {
  if (n < 1 || k < 0 || k > n - 1) throw std::out_of_range("shift count must satisfy 0 <= k <= n-1");
  const int w = n - k;
  switch (kind) {
    case ShiftKind::S_T: {
      Matrix a = Matrix::Zero(w, n);
      for (int r = 0; r < w; ++r) a(r, r) = 1.0;
      return a;
    }
    case ShiftKind::S_B: {
      Matrix a = Matrix::Zero(w, n);
      for (int r = 0; r < w; ++r) a(r, r + k) = 1.0;
      return a;
    }
    case ShiftKind::Z_B: {
      Matrix a = Matrix::Zero(n, n);
      for (int r = 0; r < w; ++r) a(r, r + k) = 1.0;
      return a;
    }
    case ShiftKind::Z_T: {
      Matrix a = Matrix::Zero(n, n);
      for (int r = 0; r < w; ++r) a(r + k, r) = 1.0;
      return a;
    }
    case ShiftKind::W_B: {
      Matrix a = Matrix::Zero(n, n);
      for (int r = k; r < n; ++r) a(r, r) = 1.0;
      return a;
    }
    case ShiftKind::W_T: {
      Matrix a = Matrix::Zero(n, n);
      for (int r = 0; r < w; ++r) a(r, r) = 1.0;
      return a;
    }
  }
  return Matrix();
}

OperatorBundle build_bundle(const PatchModel& model) { return build_bundle(model.dict(), model.N()); }

OperatorBundle build_bundle(const Dictionary& dict, int N) {
  const int n = dict.n(), m = dict.m(), P = N;
  if (N < n) throw DimensionError("signal length N must be at least the patch length n");
  const Matrix& D = dict.atoms();
  OperatorBundle b;
  b.n = n;
  b.m = m;
  b.N = N;
  b.P = P;

  b.DG = Matrix::Zero(N, m * P);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < m; ++j)
      for (int t = 0; t < n; ++t) b.DG((i + t) % N, i * m + j) += D(t, j) / n;

  b.M = Matrix::Zero(n * P, m * P);
  for (int i = 0; i < P; ++i) {
    b.M.block(i * n, i * m, n, m) += D;
    for (int t = 0; t < n; ++t) b.M.row(i * n + t) -= b.DG.row((i + t) % N);
  }

  const Matrix SBD = D.bottomRows(n - 1);
  const Matrix STD = D.topRows(n - 1);
  b.Mstar = Matrix::Zero((n - 1) * P, m * P);
  for (int i = 0; i < P; ++i) {
    const int next = (i + 1) % P;
    b.Mstar.block(i * (n - 1), i * m, n - 1, m) += SBD;
    b.Mstar.block(i * (n - 1), next * m, n - 1, m) -= STD;
  }
  return b;
}

Eigen::SparseMatrix<double> sparse_qbeta(const Dictionary& dict, int N, double beta) {
  const int n = dict.n(), m = dict.m(), P = N;
  const Matrix& D = dict.atoms();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m) * P * (3 * n));
  for (int i = 0; i < P; ++i) {
    const int prev = (i + P - 1) % P;
    for (int j = 0; j < m; ++j) {
      const int col = i * m + j;
      for (int t = 0; t < n; ++t)
        if (D(t, j) != 0.0) trip.emplace_back((i + t) % N, col, D(t, j) / n);
      if (beta == 0.0) continue;
      // rows of M_star block i hold S_B D at block i, block prev holds -S_T D at block i
      for (int t = 0; t < n - 1; ++t) {
        if (D(t + 1, j) != 0.0) trip.emplace_back(N + i * (n - 1) + t, col, beta * D(t + 1, j));
        if (D(t, j) != 0.0) trip.emplace_back(N + prev * (n - 1) + t, col, -beta * D(t, j));
      }
    }
  }
  Eigen::SparseMatrix<double> q(N + (n - 1) * P, m * P);
  q.setFromTriplets(trip.begin(), trip.end());
  return q;
}

Signal synthesize(const Dictionary& dict, const GlobalRep& gamma) {
  const int n = dict.n(), P = gamma.P(), N = P;
  if (gamma.m() != dict.m()) throw DimensionError("representation block width differs from atom count");
  Signal x = Signal::Zero(N);
  const Matrix patches = dict.atoms() * gamma.blocks();
  for (int i = 0; i < P; ++i)
    for (int t = 0; t < n; ++t) x((i + t) % N) += patches(t, i);
  return x / n;
}

double overlap_violation(const Dictionary& dict, const GlobalRep& gamma) {
  if (gamma.m() != dict.m()) throw DimensionError("representation block width differs from atom count");
  const int n = dict.n(), P = gamma.P();
  const Matrix patches = dict.atoms() * gamma.blocks();
  double worst = 0.0;
  for (int i = 0; i < P; ++i) {
    const int next = (i + 1) % P;
    worst = std::max(worst, (patches.col(i).tail(n - 1) - patches.col(next).head(n - 1)).cwiseAbs().maxCoeff());
  }
  return worst;
}

bool check_overlap_agreement(const GlobalRep& gamma, const Dictionary& dict, double tol) {
  return overlap_violation(dict, gamma) <= tol;
}

Matrix patch_projector(const Dictionary& dict, const std::vector<int>& support, double tol) {
  const int n = dict.n();
  if (support.empty()) return Matrix::Zero(n, n);
  for (int j : support)
    if (j < 0 || j >= dict.m()) throw DimensionError("support index out of range [0, m)");
  const Matrix U = range_basis_full_rank(dict.columns(support), tol);
  return U * U.transpose();
}

Matrix build_A_S(const Dictionary& dict, const SupportSequence& S, int N, double tol) {
  const int n = dict.n();
  if (S.P() != N) throw DimensionError("support sequence length must equal the patch count P = N");
  if (S.m() != dict.m()) throw DimensionError("support sequence atom count differs from the dictionary");
  Matrix A = Matrix::Zero(n * N, N);
  for (int i = 0; i < N; ++i) {
    const Matrix block = Matrix::Identity(n, n) - patch_projector(dict, S[i], tol);
    for (int t = 0; t < n; ++t) A.block(i * n, (i + t) % N, n, 1) += block.col(t);
  }
  return A;
}

Matrix averaging_operator(const Dictionary& dict, const SupportSequence& S, int N, double tol) {
  const int n = dict.n();
  if (S.P() != N) throw DimensionError("support sequence length must equal the patch count P = N");
  Matrix MA = Matrix::Zero(N, N);
  for (int i = 0; i < N; ++i) {
    const Matrix Pi = patch_projector(dict, S[i], tol);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) MA((i + a) % N, (i + b) % N) += Pi(a, b);
  }
  return MA / n;
}

GlobalRep codes_on_support(const Dictionary& dict, const SupportSequence& S, const Signal& x) {
  const int n = dict.n(), N = static_cast<int>(x.size());
  if (S.P() != N) throw DimensionError("support sequence length must equal the patch count P = N");
  GlobalRep g(dict.m(), N);
  for (int i = 0; i < N; ++i) {
    if (S[i].empty()) continue;
    const Matrix Ds = dict.columns(S[i]);
    const Vector c = Ds.colPivHouseholderQr().solve(extract_patch(x, i, n));
    for (std::size_t k = 0; k < S[i].size(); ++k) g.block(i)(S[i][k]) = c(static_cast<Eigen::Index>(k));
  }
  return g;
}

Matrix restricted_mstar(const Dictionary& dict, const SupportSequence& S) {
  const int n = dict.n(), P = S.P();
  std::vector<int> offset(static_cast<std::size_t>(P) + 1, 0);
  for (int i = 0; i < P; ++i) offset[i + 1] = offset[i] + static_cast<int>(S[i].size());
  Matrix out = Matrix::Zero((n - 1) * P, offset[P]);
  for (int i = 0; i < P; ++i) {
    const int next = (i + 1) % P;
    const Matrix Di = dict.columns(S[i]);
    const Matrix Dn = dict.columns(S[next]);
    out.block(i * (n - 1), offset[i], n - 1, Di.cols()) += Di.bottomRows(n - 1);
    out.block(i * (n - 1), offset[next], n - 1, Dn.cols()) -= Dn.topRows(n - 1);
  }
  return out;
}

}  // namespace patchsparse
