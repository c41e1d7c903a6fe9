#include "patchsparse/pursuit.hpp"

#include "patchsparse/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>

namespace patchsparse {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

Vector dense_col(const Matrix& a, int j) { return a.col(j); }
Vector dense_col(const SparseMatrix& a, int j) { return Vector(a.col(j)); }

double col_dot(const Matrix& a, int j, const Vector& v) { return a.col(j).dot(v); }
double col_dot(const SparseMatrix& a, int j, const Vector& v) {
  double acc = 0.0;
  for (SparseMatrix::InnerIterator it(a, j); it; ++it) acc += it.value() * v(it.row());
  return acc;
}

void add_col(Vector& r, const Matrix& a, int j, double scale) { r.noalias() += scale * a.col(j); }
void add_col(Vector& r, const SparseMatrix& a, int j, double scale) {
  for (SparseMatrix::InnerIterator it(a, j); it; ++it) r(it.row()) += scale * it.value();
}

Vector col_norms(const Matrix& a) { return a.colwise().norm().transpose(); }
Vector col_norms(const SparseMatrix& a) {
  Vector out(a.cols());
  for (int j = 0; j < a.cols(); ++j) out(j) = a.col(j).norm();
  return out;
}

// Greedy engine shared by every OMP flavour. `on_select` may block further
// columns through the mask.
template <class Mat>
OmpResult omp_engine(const Mat& A, const Vector& y, int K, double res_tol,
                     const std::function<void(int, std::vector<char>&)>& on_select = {}) {
  const int cols = static_cast<int>(A.cols());
  if (y.size() != A.rows()) throw DimensionError("omp: signal length differs from the dictionary row count");
  if (K < 0) throw DimensionError("omp: K must be nonnegative");
  const double ynorm = y.norm();
  if (res_tol <= 0.0) res_tol = 1e-10 * ynorm;
  const Vector norms = col_norms(A);
  const double max_norm = norms.size() ? norms.maxCoeff() : 0.0;

  std::vector<char> blocked(static_cast<std::size_t>(cols), 0);
  for (int j = 0; j < cols; ++j)
    if (norms(j) <= 1e-14 * std::max(max_norm, 1.0)) blocked[j] = 1;

  OmpResult res;
  res.coef = Vector::Zero(cols);
  Vector r = y;
  Matrix L(std::max(K, 1), std::max(K, 1));
  Vector b(std::max(K, 1));  // A_S^T y
  Vector x;
  std::vector<int>& sel = res.support;

  while (static_cast<int>(sel.size()) < K && r.norm() > res_tol) {
    const Vector c = A.transpose() * r;
    int best = -1;
    double best_score = 0.0;
    for (int j = 0; j < cols; ++j) {
      if (blocked[j]) continue;
      const double score = std::abs(c(j)) / norms(j);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0 || best_score <= 1e-14 * std::max(ynorm, 1e-300)) break;

    const int k = static_cast<int>(sel.size());
    const Vector a = dense_col(A, best);
    Vector g(k);
    for (int i = 0; i < k; ++i) g(i) = col_dot(A, sel[i], a);
    Vector w = g;
    if (k > 0) L.topLeftCorner(k, k).triangularView<Eigen::Lower>().solveInPlace(w);
    const double d2 = a.squaredNorm() - w.squaredNorm();
    blocked[best] = 1;
    if (d2 <= 1e-10 * a.squaredNorm()) continue;  // dependent on the current selection
    L.row(k).head(k) = w.transpose();
    L(k, k) = std::sqrt(d2);
    b(k) = a.dot(y);
    sel.push_back(best);
    if (on_select) on_select(best, blocked);

    const int kk = k + 1;
    x = L.topLeftCorner(kk, kk).triangularView<Eigen::Lower>().solve(b.head(kk));
    L.topLeftCorner(kk, kk).triangularView<Eigen::Lower>().transpose().solveInPlace(x);
    r = y;
    for (int i = 0; i < kk; ++i) add_col(r, A, sel[i], -x(i));
  }
  for (std::size_t i = 0; i < sel.size(); ++i) res.coef(sel[i]) = x(static_cast<Eigen::Index>(i));
  res.residual_norm = r.norm();
  return res;
}

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

void finish(PursuitResult& out, const Dictionary& dict, const Signal& y) {
  out.residual_norm = (y - out.xhat).norm();
  out.overlap_violation = overlap_violation(dict, out.gamma);
}

void check_model_signal(const PatchModel& model, const Signal& y) {
  if (y.size() != model.N()) throw DimensionError("signal length must equal the model length N");
}

}  // namespace

OmpResult omp(const Matrix& D, const Vector& y, int K, double res_tol) {
  return omp_engine(D, y, K, res_tol);
}

PursuitResult lpa(const PatchModel& model, const Signal& y, const LpaOptions& opt) {
  check_model_signal(model, y);
  const Dictionary& dict = model.dict();
  const int n = model.n(), N = model.N();
  PursuitResult out;
  out.gamma = GlobalRep(model.m(), N);
  std::vector<std::vector<int>> supports(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    const OmpResult r = omp(dict.atoms(), extract_patch(y, i, n), model.s(), opt.patch_res_tol);
    out.gamma.block(i) = r.coef;
    supports[i] = sorted(r.support);
  }
  out.support = SupportSequence(std::move(supports), model.m());
  out.xhat = synthesize(dict, out.gamma);
  out.iterations = 1;
  finish(out, dict, y);
  return out;
}

Signal project_to_model(const Signal& y, const SupportSequence& S, const Dictionary& dict) {
  const int N = static_cast<int>(y.size());
  const Kernel ker = kernel(build_A_S(dict, S, N));
  if (ker.dim == 0) return Signal::Zero(N);
  return ker.basis * (ker.basis.transpose() * y);
}

Signal oracle_project(const Signal& y, const SupportSequence& S, const Dictionary& dict, ProjectionMode mode,
                      double tol, int max_iters) {
  if (mode == ProjectionMode::direct) return project_to_model(y, S, dict);
  const int n = dict.n(), N = static_cast<int>(y.size());
  if (S.P() != N) throw DimensionError("support sequence length must equal the patch count P = N");
  if (tol <= 0.0) throw DimensionError("tolerance must be positive");
  std::vector<Matrix> proj(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) proj[i] = patch_projector(dict, S[i]);

  Signal x = y;
  double prev_step = std::numeric_limits<double>::infinity();
  double step = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Signal next = Signal::Zero(N);
    for (int i = 0; i < N; ++i) {
      if (S[i].empty()) continue;
      next += embed_patch(proj[i] * extract_patch(x, i, n), i, N);
    }
    next /= n;
    step = (next - x).norm();
    x = std::move(next);
    if (step == 0.0) return x;
    // remaining distance to the fixed point for a geometric tail with ratio q
    const double q = step / prev_step;
    if (q < 1.0 && step * q / (1.0 - q) <= tol && step <= tol) return x;
    prev_step = step;
  }
  throw ConvergenceError("oracle projection did not converge within max_iters", step);
}

PursuitResult project_result(const PursuitResult& r, const Signal& y, const Dictionary& dict) {
  PursuitResult out = r;
  try {
    out.xhat = project_to_model(y, r.support, dict);
    out.gamma = codes_on_support(dict, r.support, out.xhat);
    out.projected = true;
    out.warning = false;
  } catch (const NonMinimalSupport& e) {
    out.projected = false;
    out.warning = true;
    out.message = std::string("projection skipped: ") + e.what();
    return out;
  }
  finish(out, dict, y);
  return out;
}

namespace {

OmpResult qomp_core(const PatchModel& model, const Signal& y, double beta, const QompOptions& opt) {
  check_model_signal(model, y);
  if (!(beta >= 0.0)) throw DimensionError("beta must be nonnegative");
  const int n = model.n(), m = model.m(), N = model.N(), s = model.s();
  const int K = opt.k_global.value_or(s * N);
  const SparseMatrix Q = sparse_qbeta(model.dict(), N, beta);
  Vector Y = Vector::Zero(Q.rows());
  Y.head(N) = y;
  const double tol = opt.res_tol > 0.0 ? opt.res_tol : 1e-10 * y.norm();
  std::function<void(int, std::vector<char>&)> cap;
  if (opt.per_patch_cap) {
    auto counts = std::make_shared<std::vector<int>>(static_cast<std::size_t>(N), 0);
    cap = [counts, m, s](int j, std::vector<char>& blocked) {
      const int blk = j / m;
      if (++(*counts)[blk] >= s)
        for (int t = 0; t < m; ++t) blocked[static_cast<std::size_t>(blk * m + t)] = 1;
    };
  }
  (void)n;
  return omp_engine(Q, Y, K, tol, cap);
}

}  // namespace

std::vector<int> qomp_selection(const PatchModel& model, const Signal& y, double beta, const QompOptions& opt) {
  return qomp_core(model, y, beta, opt).support;
}

PursuitResult qomp(const PatchModel& model, const Signal& y, double beta, const QompOptions& opt) {
  if (!(beta > 0.0)) throw DimensionError("beta must be positive");
  const OmpResult r = qomp_core(model, y, beta, opt);
  const int m = model.m(), N = model.N();
  PursuitResult out;
  out.gamma = GlobalRep::from_flat(r.coef, m);
  std::vector<std::vector<int>> supports(static_cast<std::size_t>(N));
  for (int j : r.support) supports[static_cast<std::size_t>(j / m)].push_back(j % m);
  for (auto& sp : supports) std::sort(sp.begin(), sp.end());
  out.support = SupportSequence(std::move(supports), m);
  out.xhat = synthesize(model.dict(), out.gamma);
  out.iterations = static_cast<int>(r.support.size());
  finish(out, model.dict(), y);
  if (opt.project) return project_result(out, y, model.dict());
  return out;
}

PursuitResult admm_pursuit(const PatchModel& model, const Signal& y, const AdmmOptions& opt) {
  check_model_signal(model, y);
  if (!(opt.rho > 0.0)) throw DimensionError("rho must be positive");
  if (opt.outer_iters < 1) throw DimensionError("outer_iters must be positive");
  if (!(opt.rho_growth >= 1.0)) throw DimensionError("rho_growth must be >= 1");
  const Dictionary& dict = model.dict();
  const Matrix& D = dict.atoms();
  const int n = model.n(), m = model.m(), N = model.N(), s = model.s();
  const int q = m + n - 1;  // rows of A = [I; S_B D]
  const Matrix SBD = D.bottomRows(n - 1);
  const Matrix STD = D.topRows(n - 1);
  double rho = opt.rho;
  double w = std::sqrt(rho / 2.0);

  Matrix Dt(n + q, m);
  Dt << D, w * Matrix::Identity(m, m), w * SBD;
  // z-update normal matrix: I + (S_T D)^T S_T D
  const Eigen::LLT<Matrix> zsolve(Matrix::Identity(m, m) + STD.transpose() * STD);

  Matrix patches(n, N);
  for (int i = 0; i < N; ++i) patches.col(i) = extract_patch(y, i, n);

  Matrix alpha = Matrix::Zero(m, N), Z = Matrix::Zero(m, N), U = Matrix::Zero(q, N);
  std::vector<std::vector<int>> supports(static_cast<std::size_t>(N));
  PursuitResult out;
  int it = 0;
  for (; it < opt.outer_iters;) {
    ++it;
    // (a) per-patch sparse coding against the augmented dictionary
    for (int i = 0; i < N; ++i) {
      const int next = (i + 1) % N;
      Vector target(n + q);
      target.head(n) = patches.col(i);
      target.segment(n, m) = w * (Z.col(i) - U.col(i).head(m));
      target.tail(n - 1) = w * (STD * Z.col(next) - U.col(i).tail(n - 1));
      const OmpResult r = omp(Dt, target, s);
      alpha.col(i) = r.coef;
      supports[i] = sorted(r.support);
    }
    // (b) least squares for Z; the normal equations decouple per block
    Matrix V1(m, N), V2(n - 1, N);
    V1 = alpha + U.topRows(m);
    V2 = SBD * alpha + U.bottomRows(n - 1);
    Matrix Znew(m, N);
    for (int j = 0; j < N; ++j) {
      const int prev = (j + N - 1) % N;
      Znew.col(j) = zsolve.solve(V1.col(j) + STD.transpose() * V2.col(prev));
    }
    const double dz = (Znew - Z).cwiseAbs().maxCoeff();
    Z = std::move(Znew);
    // (c) dual update with the primal residual A alpha - B Z
    Matrix resid(q, N);
    resid.topRows(m) = alpha - Z;
    for (int i = 0; i < N; ++i) resid.col(i).tail(n - 1) = SBD * alpha.col(i) - STD * Z.col((i + 1) % N);
    U += resid;
    const double primal = resid.cwiseAbs().maxCoeff();
    if (std::max(primal, dz) <= opt.tol) break;
    if (opt.rho_growth > 1.0 && rho < opt.rho_max) {
      const double g = std::min(opt.rho_growth, opt.rho_max / rho);
      rho *= g;
      U /= g;
      w = std::sqrt(rho / 2.0);
      Dt.bottomRows(q) << w * Matrix::Identity(m, m), w * SBD;
    }
  }
  out.gamma = GlobalRep(alpha);
  out.support = SupportSequence(supports, m);
  out.xhat = synthesize(dict, out.gamma);
  out.iterations = it;
  finish(out, dict, y);
  out.projected = out.overlap_violation <= 1e-8;
  return out;
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::lpa: return "lpa";
    case Algorithm::qomp: return "qomp";
    case Algorithm::admm: return "admm";
    case Algorithm::oracle: return "oracle";
  }
  return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "lpa") return Algorithm::lpa;
  if (name == "qomp") return Algorithm::qomp;
  if (name == "admm") return Algorithm::admm;
  if (name == "oracle") return Algorithm::oracle;
  throw DimensionError("unknown algorithm: " + name);
}

}  // namespace patchsparse
