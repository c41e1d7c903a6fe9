#include "patchsparse/dictionaries.hpp"

#include "patchsparse/errors.hpp"
#include "patchsparse/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace patchsparse {

Dictionary heaviside(int n) {
  if (n < 2) throw std::invalid_argument("Heaviside dictionary needs n >= 2");
  Matrix h = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) h.col(j).head(j + 1).setOnes();
  return Dictionary(std::move(h), DictionaryKind::heaviside, false);
}

Matrix signature_windows(const Vector& base, int n) {
  const auto m = static_cast<int>(base.size());
  if (m < 1 || n < 2) throw std::invalid_argument("signature needs a nonempty base and n >= 2");
  Matrix w(n, m);
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < n; ++t) w(t, i) = base((i + t) % m);
  return w;
}

Dictionary signature(const Vector& base, int n) {
  Matrix w = signature_windows(base, n);
  Vector scales(w.cols());
  for (Eigen::Index i = 0; i < w.cols(); ++i) {
    scales(i) = w.col(i).norm();
    if (!(scales(i) > 0.0))
      throw ConstructionError("signature base has a zero cyclic window at shift " + std::to_string(i));
    w.col(i) /= scales(i);
  }
  Dictionary d(std::move(w), DictionaryKind::signature, true);
  d.set_scales(std::move(scales));
  return d;
}

Dictionary multi_signature(const SignatureSpec& spec) {
  const auto r = static_cast<int>(spec.base.rows());
  const auto s = static_cast<int>(spec.base.cols());
  const int n = spec.n;
  if (r < 1 || s < 1 || n < 2) throw std::invalid_argument("multi-signature needs r, s >= 1 and n >= 2");
  if (!spec.transfer.empty() && static_cast<int>(spec.transfer.size()) != r)
    throw DimensionError("multi-signature needs one transfer matrix per block");
  Matrix atoms(n, r * s);
  for (int i = 0; i < r; ++i) {
    Matrix Y(n, s);
    for (int j = 0; j < s; ++j)
      for (int t = 0; t < n; ++t) Y(t, j) = spec.base((i + t) % r, j);
    if (spec.transfer.empty()) {
      atoms.middleCols(i * s, s) = Y;
      continue;
    }
    const Matrix& Mi = spec.transfer[static_cast<std::size_t>(i)];
    if (Mi.rows() != s || Mi.cols() != s) throw DimensionError("transfer matrices must be s x s");
    if (rank(Mi) < s) throw ConstructionError("transfer matrix " + std::to_string(i) + " is singular");
    atoms.middleCols(i * s, s) = Y * Mi;
  }
  Vector scales(atoms.cols());
  for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
    scales(j) = atoms.col(j).norm();
    if (!(scales(j) > 0.0)) throw ConstructionError("multi-signature atom " + std::to_string(j) + " is zero");
    atoms.col(j) /= scales(j);
  }
  Dictionary d(std::move(atoms), DictionaryKind::multi_signature, true);
  d.set_scales(std::move(scales));
  return d;
}

SignatureSpec random_multi_signature_spec(int n, int m, int s, std::uint64_t seed) {
  if (s < 1 || m % s != 0) throw std::invalid_argument("s must divide m");
  const int r = m / s;
  Rng rng(seed);
  SignatureSpec spec;
  spec.n = n;
  spec.base = Matrix(r, s);
  for (int j = 0; j < s; ++j)
    for (int i = 0; i < r; ++i) spec.base(i, j) = rng.normal();
  for (int i = 0; i < r; ++i) {
    Matrix Mi(s, s);
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) Mi(a, b) = rng.normal();
    spec.transfer.push_back(std::move(Mi));
  }
  return spec;
}

double mutual_coherence(const Matrix& atoms) {
  Matrix d = atoms;
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    const double nrm = d.col(j).norm();
    if (nrm > 0.0) d.col(j) /= nrm;
  }
  Matrix g = (d.transpose() * d).cwiseAbs();
  g.diagonal().setZero();
  return g.size() == 0 ? 0.0 : g.maxCoeff();
}

namespace {

// Smoothed max of |G_ij| over i < j and its gradient with respect to the base.
double smoothed_coherence(const Vector& x, int n, double temp, Vector& grad, double& hard_max) {
  const auto m = static_cast<int>(x.size());
  const Matrix w = signature_windows(x, n);
  Vector norms = w.colwise().norm().transpose();
  Matrix d = w;
  for (int i = 0; i < m; ++i) d.col(i) /= norms(i);
  const Matrix g = d.transpose() * d;

  hard_max = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) hard_max = std::max(hard_max, std::abs(g(i, j)));

  double z = 0.0;
  Matrix weight = Matrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double e = std::exp((std::abs(g(i, j)) - hard_max) / temp);
      weight(i, j) = e * (g(i, j) >= 0.0 ? 1.0 : -1.0);
      z += e;
    }
  weight /= z;
  weight = weight + weight.transpose().eval();
  const double loss = hard_max + temp * std::log(z);

  const Matrix gd = d * weight;  // dL/dd_i
  grad = Vector::Zero(m);
  for (int i = 0; i < m; ++i) {
    const Vector gi = (gd.col(i) - d.col(i) * d.col(i).dot(gd.col(i))) / norms(i);
    for (int t = 0; t < n; ++t) grad((i + t) % m) += gi(t);
  }
  return loss;
}

}  // namespace

CoherenceOptimizerResult optimize_signature_coherence(int n, int m, const CoherenceOptimizerOptions& opt) {
  if (n >= m) throw std::invalid_argument("coherence optimization needs n < m");
  if (opt.iterations < 0 || opt.restarts < 1 || !(opt.step > 0.0))
    throw std::invalid_argument("invalid optimizer settings");
  CoherenceOptimizerResult best;
  best.coherence = std::numeric_limits<double>::infinity();
  Rng root(opt.seed);
  for (int restart = 0; restart < opt.restarts; ++restart) {
    Rng rng = root.fork(static_cast<std::uint64_t>(restart));
    Vector x(m);
    for (int i = 0; i < m; ++i) x(i) = rng.normal();
    Vector mom = Vector::Zero(m), vel = Vector::Zero(m), grad;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-12;
    double temp = opt.temperature;
    double hard = 0.0;
    smoothed_coherence(x, n, temp, grad, hard);
    Vector run_best = x;
    double run_mu = hard;
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(opt.iterations));
    for (int it = 1; it <= opt.iterations; ++it) {
      mom = b1 * mom + (1 - b1) * grad;
      vel = b2 * vel + (1 - b2) * grad.cwiseAbs2();
      const Vector mhat = mom / (1 - std::pow(b1, it));
      const Vector vhat = vel / (1 - std::pow(b2, it));
      x -= opt.step * (mhat.array() / (vhat.array().sqrt() + eps)).matrix();
      x /= x.norm() / std::sqrt(static_cast<double>(m));  // coherence is scale-free
      smoothed_coherence(x, n, temp, grad, hard);
      if (hard < run_mu) {
        run_mu = hard;
        run_best = x;
      }
      history.push_back(run_mu);
      if (run_mu <= opt.target) break;
      if (opt.anneal_every > 0 && it % opt.anneal_every == 0) temp *= 0.5;
    }
    if (run_mu < best.coherence) {
      best.coherence = run_mu;
      best.base = run_best;
    }
    best.best_history = std::move(history);
  }
  best.dict = signature(best.base, n);
  best.coherence = mutual_coherence(best.dict.atoms());
  return best;
}

Dictionary csc_pseudo_local(const Dictionary& dprime) {
  const int n = dprime.n(), m = dprime.m();
  Matrix theta(n, (2 * n - 1) * m);
  int block = 0;
  for (int k = n - 1; k >= 1; --k) theta.middleCols((block++) * m, m) = shift_op(ShiftKind::Z_B, k, n) * dprime.atoms();
  theta.middleCols((block++) * m, m) = dprime.atoms();
  for (int k = 1; k <= n - 1; ++k) theta.middleCols((block++) * m, m) = shift_op(ShiftKind::Z_T, k, n) * dprime.atoms();
  return Dictionary(std::move(theta), DictionaryKind::custom, false);
}

Dictionary normalize_atoms(const Dictionary& dict) {
  Matrix a = dict.atoms();
  Vector scales(a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    scales(j) = a.col(j).norm();
    if (!(scales(j) > 0.0)) throw ConstructionError("cannot normalize zero atom " + std::to_string(j));
    a.col(j) /= scales(j);
  }
  Dictionary out(std::move(a), dict.kind(), true);
  if (dict.scales().size() == scales.size()) scales = scales.cwiseProduct(dict.scales());
  out.set_scales(std::move(scales));
  return out;
}

SignatureSignal signature_signal(const Dictionary& dict, const Vector& base, int N,
                                 const std::vector<int>& shifts, const std::vector<double>& weights) {
  const auto m = static_cast<int>(base.size());
  if (m != dict.m()) throw DimensionError("base length must equal the atom count");
  if (N % m != 0) throw DimensionError("signal length must be a multiple of the base length");
  if (shifts.size() != weights.size()) throw DimensionError("one weight per shift is required");
  Signal x = Signal::Zero(N);
  for (std::size_t j = 0; j < shifts.size(); ++j)
    for (int k = 0; k < N; ++k) x(k) += weights[j] * base((k + shifts[j]) % m);
  std::vector<std::vector<int>> sup(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    for (int t : shifts) sup[static_cast<std::size_t>(i)].push_back((t + i) % m);
  SupportSequence S(std::move(sup), m);
  GlobalRep gamma = codes_on_support(dict, S, x);
  return {std::move(x), std::move(S), std::move(gamma)};
}

}  // namespace patchsparse
