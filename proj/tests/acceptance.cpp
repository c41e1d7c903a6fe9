// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include "patchsparse/bench.hpp"
#include "patchsparse/combinatorics.hpp"
#include "patchsparse/core.hpp"
#include "patchsparse/dictionaries.hpp"
#include "patchsparse/errors.hpp"
#include "patchsparse/graphmodel.hpp"
#include "patchsparse/measures.hpp"
#include "patchsparse/pursuit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace patchsparse;

namespace {

// ---- pinned tolerances and budgets --------------------------------------
constexpr double kKernelTol = 1e-10;        // criterion 1, relative SVD threshold
constexpr double kBudget1 = 10.0;           // seconds
constexpr double kIdentityTol = 1e-10;      // criterion 2, relative
constexpr double kBudget2 = 5.0;
constexpr double kContractionSlack = 1e-10; // criterion 3
constexpr double kPowerTol = 1e-6;
constexpr int kPowerMaxIters = 10000;
constexpr double kModeAgreement = 1e-5;
constexpr double kStdErrors = 3.0;          // criterion 4
constexpr double kExactCoeffTol = 1e-10;    // criterion 5
constexpr double kPiLimitTol = 1e-2;
constexpr double kEigenTol = 1e-8;
constexpr double kMonteCarloRel = 0.05;
constexpr double kCoherenceMax = 0.35;      // criterion 6
constexpr double kWilsonZ = 1.959963984540054;
constexpr double kBudget6 = 600.0;
constexpr double kViolationMax = 1e-6;      // criterion 7
constexpr double kProjectedRatio = 50.0;
constexpr double kOrderSlack = 1e-12;       // criterion 8, float slack on exact inequalities
constexpr double kBudget8 = 300.0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("CRITERION %d: %s  %s | %s\n", id, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(const std::string& line) {
  std::printf("    %s\n", line.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Matrix gaussian(int r, int c, Rng& rng) {
  Matrix a(r, c);
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < r; ++i) a(i, j) = rng.normal();
  return a;
}

Vector gaussian(int n, Rng& rng) { return gaussian(n, 1, rng).col(0); }

double rel(double err, double scale) { return err / std::max(1.0, scale); }

// Wilson score interval for k successes out of n.
std::pair<double, double> wilson(int k, int n) {
  const double p = static_cast<double>(k) / n, z2 = kWilsonZ * kWilsonZ;
  const double c = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double h = kWilsonZ * std::sqrt(p * (1 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, c - h), std::min(1.0, c + h)};
}

// ---------------------------------------------------------------------------
void criterion1() {
  const auto t0 = Clock::now();
  Rng rng(1001);
  const int triples[3][3] = {{2, 3, 6}, {3, 5, 8}, {4, 6, 12}};
  int ok = 0, total = 0;
  for (const auto& t : triples) {
    const int n = t[0], m = t[1], N = t[2];
    for (int rep = 0; rep < 20; ++rep) {
      Matrix a = gaussian(n, m, rng);
      if (rank(a) < n) {
        --rep;
        continue;
      }
      const OperatorBundle B = build_bundle(Dictionary(a, DictionaryKind::custom), N);
      const int dim = kernel(B.M, kKernelTol).dim;
      ok += dim == N * (m - n + 1);
      ++total;
    }
  }
  const double dt = seconds_since(t0);
  report(1, ok == total && dt < kBudget1, "dim ker M = N(m-n+1)",
         std::to_string(ok) + "/" + std::to_string(total) + " exact, " + fmt("%.2f s", dt));
}

// ---------------------------------------------------------------------------
void criterion2() {
  const auto t0 = Clock::now();
  Rng rng(1002);
  double worst_res = 0, worst_prop = 0, worst_energy = 0, worst_obj = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const int n = 2 + static_cast<int>(rng.below(11));  // 2..12
    const int m = n + static_cast<int>(rng.below(4));
    const int N = n + static_cast<int>(rng.below(2 * n + 1));

    // (n-1) I = sum_k W_B^(k) + W_T^(k)
    Matrix sum = Matrix::Zero(n, n);
    for (int k = 1; k <= n - 1; ++k) sum += shift_op(ShiftKind::W_B, k, n) + shift_op(ShiftKind::W_T, k, n);
    worst_res = std::max(worst_res, rel((sum - (n - 1) * Matrix::Identity(n, n)).norm(), n - 1.0));

    // overlap propagation on consistent patch vectors u_i = D alpha_i
    const Matrix D = gaussian(n, m, rng);
    const Signal x = gaussian(N, rng);
    const Matrix pinv = pseudoinverse(D);
    std::vector<Vector> u(static_cast<std::size_t>(N));
    GlobalRep gamma(m, N);
    const Kernel kerD = kernel(D);
    for (int i = 0; i < N; ++i) {
      gamma.block(i) = pinv * extract_patch(x, i, n);
      if (kerD.dim > 0) gamma.block(i) += kerD.basis * gaussian(kerD.dim, rng);  // stays consistent
      u[i] = D * gamma.block(i);
    }
    for (int k = 0; k <= n - 1; ++k)
      for (int i = 0; i < N; ++i) {
        const Vector& a = u[i];
        const Vector& b = u[(i + k) % N];
        const double scale = a.norm() + b.norm();
        worst_prop = std::max(
            worst_prop, rel((shift_op(ShiftKind::W_B, k, n) * a - shift_op(ShiftKind::Z_T, k, n) * b).norm(), scale));
        worst_prop = std::max(
            worst_prop, rel((shift_op(ShiftKind::Z_B, k, n) * a - shift_op(ShiftKind::W_T, k, n) * b).norm(), scale));
      }

    // ||rho||^2 = (1/n) sum_j ||R_j rho||^2
    const Signal rho = gaussian(N, rng);
    double acc = 0;
    for (int j = 0; j < N; ++j) acc += extract_patch(rho, j, n).squaredNorm();
    worst_energy = std::max(worst_energy, rel(std::abs(acc / n - rho.squaredNorm()), rho.squaredNorm()));

    // M Gamma = 0  =>  ||y - D_G Gamma||^2 = (1/n) sum_j ||R_j y - D alpha_j||^2
    const Dictionary dict(D, DictionaryKind::custom);
    const OperatorBundle B = build_bundle(dict, N);
    const Vector flat = gamma.flat();
    const double mres = (B.M * flat).norm();
    const Signal y = gaussian(N, rng);
    const double lhs = (y - B.DG * flat).squaredNorm();
    double rhs = 0;
    for (int j = 0; j < N; ++j) rhs += (extract_patch(y, j, n) - D * gamma.block(j)).squaredNorm();
    rhs /= n;
    worst_obj = std::max(worst_obj, std::max(rel(std::abs(lhs - rhs), lhs), rel(mres, flat.norm())));
  }
  const double dt = seconds_since(t0);
  const bool pass = worst_res <= kIdentityTol && worst_prop <= kIdentityTol && worst_energy <= kIdentityTol &&
                    worst_obj <= kIdentityTol && dt < kBudget2;
  std::ostringstream os;
  os << "resolution " << worst_res << ", propagation " << worst_prop << ", energy " << worst_energy << ", objective "
     << worst_obj << ", " << fmt("%.2f s", dt);
  report(2, pass, "shift-operator identity suite (100 instances, n <= 12)", os.str());
}

// ---------------------------------------------------------------------------
struct OracleCase {
  Dictionary dict;
  SupportSequence S;
  int N;
  std::string label;
};

std::vector<OracleCase> realizable_models() {
  std::vector<OracleCase> out;
  Rng rng(1003);
  for (int t = 0; t < 8; ++t) {
    const int n = 4 + t % 3, N = 30 + 5 * (t % 3);
    PwcSignal p = random_pwc(N, n, 2 + t % 3, n, rng);
    out.push_back({heaviside(n), p.support, N, "pwc n=" + std::to_string(n)});
  }
  for (int t = 0; t < 8; ++t) {
    const Vector base = gaussian(10, rng);
    Dictionary d = signature(base, 6);
    const int k = 1 + t % 2;
    std::vector<int> shifts{static_cast<int>(rng.below(10))};
    if (k == 2) shifts.push_back((shifts[0] + 1 + static_cast<int>(rng.below(9))) % 10);
    SignatureSignal sig = signature_signal(d, base, 30, shifts, std::vector<double>(shifts.size(), 1.0));
    out.push_back({d, sig.support, 30, "signature k=" + std::to_string(k)});
  }
  for (int t = 0; t < 4; ++t) {
    const int n = 8, r = 5, s = 2, N = 20;
    Dictionary d = multi_signature(random_multi_signature_spec(n, r * s, s, 40 + t));
    std::vector<std::vector<int>> sets;
    for (int i = 0; i < N; ++i) sets.push_back({((t + i) % r) * s, ((t + i) % r) * s + 1});
    out.push_back({d, SupportSequence(sets, r * s), N, "multi-signature"});
  }
  return out;
}

void criterion3() {
  Rng rng(1004);
  double worst_norm = 0, worst_power = 0, worst_modes = 0;
  int worst_k = 0, passed = 0;
  const auto models = realizable_models();
  for (const auto& mc : models) {
    const Matrix MA = averaging_operator(mc.dict, mc.S, mc.N);
    const double nrm = spectral_norm(MA);
    worst_norm = std::max(worst_norm, nrm);
    const Kernel ker = kernel(build_A_S(mc.dict, mc.S, mc.N));
    const Signal y = gaussian(mc.N, rng);
    const Signal target = ker.basis * (ker.basis.transpose() * y);
    Signal x = y;
    int k = 0;
    double err = (x - target).norm();
    while (err > kPowerTol && k < kPowerMaxIters) {
      x = MA * x;
      ++k;
      err = (x - target).norm();
    }
    worst_power = std::max(worst_power, err);
    worst_k = std::max(worst_k, k);
    const Signal direct = oracle_project(y, mc.S, mc.dict, ProjectionMode::direct);
    const Signal iter = oracle_project(y, mc.S, mc.dict, ProjectionMode::iterative, 1e-9, 200000);
    const double gap = (direct - iter).norm();
    worst_modes = std::max(worst_modes, gap);
    passed += nrm <= 1 + kContractionSlack && err <= kPowerTol && gap <= kModeAgreement && ker.dim > 0;
  }
  std::ostringstream os;
  os << passed << "/" << models.size() << " models; max ||M_A|| = " << fmt("%.15f", worst_norm)
     << ", max power error " << worst_power << " (max k = " << worst_k << "), max mode gap " << worst_modes;
  report(3, passed == static_cast<int>(models.size()), "contraction and convergence to the oracle projector",
         os.str());
}

// ---------------------------------------------------------------------------
void criterion4() {
  Rng rng(1005);
  const int N = 60, n = 10, draws = 10000;
  const double sigma = 0.5;
  bool pass = true;
  std::ostringstream os;
  for (int segs : {2, 3, 5}) {
    PwcSignal p = random_pwc(N, n, segs, n, rng);
    const Kernel ker = kernel(build_A_S(heaviside(n), p.support, N));
    const Matrix& W = ker.basis;
    // spot check against the library projection
    const Signal y0 = add_noise(p.x, sigma, rng);
    const double lib = (oracle_project(y0, p.support, heaviside(n)) - W * (W.transpose() * y0)).norm();
    double sum = 0, sum2 = 0;
    for (int t = 0; t < draws; ++t) {
      const Signal y = add_noise(p.x, sigma, rng);
      const double e = (W * (W.transpose() * y) - p.x).squaredNorm();
      sum += e;
      sum2 += e * e;
    }
    const double mean = sum / draws, se = std::sqrt((sum2 / draws - mean * mean) / draws);
    const double law = segs * sigma * sigma;
    const bool ok = std::abs(mean - law) <= kStdErrors * se && ker.dim == segs && lib <= 1e-10;
    pass = pass && ok;
    os << "segments " << segs << ": " << fmt("%.5f", mean) << " vs " << fmt("%.5f", law) << " (se "
       << fmt("%.5f", se) << ", per-sample " << fmt("%.6f", mean / N) << "); ";
  }
  report(4, pass, "oracle error on PWC signals = (#segments) sigma^2, 1e4 draws", os.str());
}

// ---------------------------------------------------------------------------
void criterion5() {
  std::ostringstream os;
  // (a) n = 4, alpha = 3; entry t belongs to noise offset i = t - k
  const auto c1 = pwc_pixel_coefficients_exact(4, 3, 1);
  const auto c2 = pwc_pixel_coefficients_exact(4, 3, 2);
  const bool a = c1 == std::vector<Rational>{{7, 24}, {5, 12}, {7, 24}} &&
                 c2[2] == Rational(13, 24) && c2[1] == Rational(7, 24) && c2[0] == Rational(1, 6);
  os << "(a) " << (a ? "exact" : "MISMATCH");

  // (b) closed form for n >= alpha against the coefficient sum
  double worst = 0;
  for (int n = 2; n <= 40; ++n)
    for (int alpha = 1; alpha <= n; ++alpha)
      worst = std::max(worst, std::abs(*R_closed_form(n, alpha) - R_coefficient_sum(n, alpha)));
  const bool b = worst <= kExactCoeffTol;
  os << "; (b) max gap " << worst;

  // (c) R(n, n) for large n
  const double limit = std::numbers::pi * std::numbers::pi / 3.0 - 2.0;
  const double r200 = R_theory(200, 200);
  const bool c = std::abs(r200 - limit) <= kPiLimitTol;
  os << "; (c) R(200,200) = " << fmt("%.6f", r200) << " vs " << fmt("%.6f", limit);

  // (d) theory vs eigenvalues of M_A M_A^T and Monte Carlo
  Rng rng(1006);
  const int N = 40, n = 8;
  const double sigma = 0.3;
  double worst_eig = 0, worst_mc = 0;
  for (int t = 0; t < 10; ++t) {
    PwcSignal p = random_pwc(N, n, 2 + t % 4, 2, rng);
    const Matrix MA = averaging_operator(heaviside(n), p.support, N);
    const double theory = lpa_pwc_mse_theory(n, p.lengths, sigma);
    worst_eig = std::max(worst_eig, std::abs(sigma * sigma * (MA * MA.transpose()).trace() - theory));
    double acc = 0;
    const int trials = 10000;
    for (int k = 0; k < trials; ++k) {
      const Signal y = add_noise(p.x, sigma, rng);
      acc += (MA * y - p.x).squaredNorm();
    }
    worst_mc = std::max(worst_mc, std::abs(acc / trials - theory) / theory);
  }
  const bool d = worst_eig <= kEigenTol && worst_mc <= kMonteCarloRel;
  os << "; (d) eigen gap " << worst_eig << ", Monte Carlo rel. gap " << fmt("%.4f", worst_mc);
  report(5, a && b && c && d, "R(n, alpha) theory", os.str());
}

// ---------------------------------------------------------------------------
void criterion6() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  cfg.kind = "signature";
  cfg.n = 15;
  cfg.m = 20;
  cfg.N = 100;
  cfg.sparsities = {1, 2, 3, 4};
  cfg.optimizer_iterations = 10000;
  cfg.optimizer_target = 0.26;
  cfg.dict_seed = 7;
  cfg.trials = 1000;
  cfg.seed = 2024;
  AlgorithmSpec l;
  l.algo = Algorithm::lpa;
  AlgorithmSpec q;
  q.algo = Algorithm::qomp;
  q.betas = {1.0};
  cfg.algorithms = {l, q};
  const double mu = mutual_coherence(experiment_dictionary(cfg).atoms());
  const auto records = recovery_records(cfg);
  std::map<std::pair<std::string, int>, std::pair<int, int>> tally;
  for (const auto& r : records) {
    auto& t = tally[{r.algo, r.sparsity}];
    t.first += r.support_exact;
    ++t.second;
  }
  auto rate = [&](const std::string& algo, int s) {
    const auto [k, n] = tally.at({algo, s});
    return std::make_pair(static_cast<double>(k) / n, wilson(k, n));
  };
  std::ostringstream os;
  os << "mu = " << fmt("%.4f", mu) << ", " << cfg.trials << " trials";
  for (int s = 1; s <= 4; ++s)
    for (const char* algo : {"lpa", "qomp"}) {
      const auto [p, ci] = rate(algo, s);
      os << "; " << algo << " s=" << s << ": " << fmt("%.3f", p) << " [" << fmt("%.3f", ci.first) << ","
         << fmt("%.3f", ci.second) << "]";
    }
  const bool lpa12 = rate("lpa", 1).first == 1.0 && rate("lpa", 2).first == 1.0;
  const bool lpa3 = rate("lpa", 3).second.second >= 0.95;
  const bool q4 = rate("qomp", 4).second.second >= 0.95;
  const bool beats = rate("qomp", 4).first > rate("lpa", 4).first;
  const double dt = seconds_since(t0);
  os << "; " << fmt("%.1f s", dt);
  report(6, mu <= kCoherenceMax && lpa12 && lpa3 && q4 && beats && dt < kBudget6,
         "noiseless recovery on the coherence-optimized signature dictionary", os.str());
  if (!beats) info("Q-OMP does not strictly exceed LPA at s = 4");
}

// ---------------------------------------------------------------------------
ExperimentConfig pwc_config(const AdmmOptions& admm) {
  ExperimentConfig cfg;
  cfg.kind = "heaviside";
  cfg.n = cfg.m = 20;
  cfg.N = 200;
  cfg.segments = 8;
  cfg.sparsities = {2};
  cfg.sigmas = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  cfg.trials = 10;
  cfg.seed = 77;
  AlgorithmSpec l;
  l.algo = Algorithm::lpa;
  AlgorithmSpec a;
  a.algo = Algorithm::admm;
  a.admm = admm;
  AlgorithmSpec o;
  o.algo = Algorithm::oracle;
  cfg.algorithms = {l, a, o};
  return cfg;
}

struct DenoiseSummary {
  std::map<double, double> lpa, lpa_proj, admm, oracle, admm_viol_max;
};

DenoiseSummary summarize(const std::vector<ResultRecord>& recs) {
  DenoiseSummary s;
  std::map<double, int> count;
  for (const auto& r : recs) {
    if (r.algo == "lpa" && !r.projected) {
      s.lpa[r.sigma] += r.mse;
      ++count[r.sigma];
    }
    if (r.algo == "lpa" && r.projected) s.lpa_proj[r.sigma] += r.mse;
    if (r.algo == "admm" && !r.projected) {
      s.admm[r.sigma] += r.mse;
      s.admm_viol_max[r.sigma] = std::max(s.admm_viol_max[r.sigma], r.overlap_violation);
    }
    if (r.algo == "oracle") s.oracle[r.sigma] += r.mse;
  }
  for (auto& [sig, c] : count) {
    s.lpa[sig] /= c;
    s.lpa_proj[sig] /= c;
    s.admm[sig] /= c;
    s.oracle[sig] /= c;
  }
  return s;
}

void criterion7() {
  const auto t0 = Clock::now();
  // pinned: penalty continuation, rho 1 -> growth 1.005 per sweep, 3000 sweeps
  AdmmOptions admm;
  admm.rho = 1.0;
  admm.rho_growth = 1.005;
  admm.rho_max = 1e6;
  admm.outer_iters = 3000;
  admm.tol = 1e-6;
  const DenoiseSummary s = summarize(denoising_records(pwc_config(admm)));
  bool order = true;
  double worst_viol = 0;
  for (const auto& [sig, v] : s.admm) {
    order = order && v <= s.lpa.at(sig);
    worst_viol = std::max(worst_viol, s.admm_viol_max.at(sig));
    info("sigma " + fmt("%.1f", sig) + ": admm " + fmt("%.6f", v) + ", lpa " + fmt("%.6f", s.lpa.at(sig)) +
         ", projected lpa " + fmt("%.6f", s.lpa_proj.at(sig)) + ", oracle " + fmt("%.6f", s.oracle.at(sig)) +
         ", max admm violation " + fmt("%.2e", s.admm_viol_max.at(sig)));
  }
  const double ratio = s.lpa_proj.at(0.1) / s.admm.at(0.1);
  const bool viol = worst_viol <= kViolationMax;
  const bool rat = ratio >= kProjectedRatio;

  // the fixed-penalty defaults, for reference
  const DenoiseSummary d = summarize(denoising_records(pwc_config(AdmmOptions{})));
  bool order_d = true;
  double viol_d = 0;
  for (const auto& [sig, v] : d.admm) {
    order_d = order_d && v <= d.lpa.at(sig);
    viol_d = std::max(viol_d, d.admm_viol_max.at(sig));
  }
  info(std::string("fixed rho = 1, 300 sweeps: ordering ") + (order_d ? "holds" : "fails") +
       ", max violation " + fmt("%.2e", viol_d) + ", projected-lpa ratio at 0.1 " +
       fmt("%.1f", d.lpa_proj.at(0.1) / d.admm.at(0.1)));

  std::ostringstream os;
  os << "ADMM <= LPA at every sigma: " << (order ? "yes" : "no") << "; max ||M* Gamma||_inf = " << worst_viol
     << "; projected-LPA / ADMM at 0.1 = " << fmt("%.1f", ratio) << "; " << fmt("%.1f s", seconds_since(t0));
  report(7, order && viol && rat, "PWC denoising ordering (N=200, n=m=20, 10 trials)", os.str());
}

// ---------------------------------------------------------------------------
struct TinyModel {
  Dictionary dict;  // unit-norm atoms
  int s, N;
  bool generalized;  // generalized RIP of order 1 and 2s within reach
  std::string label;
};

// Representations of the model signal x: per patch, every support of size <= s
// spanning the patch exactly. Returns false when two distinct ones exist.
bool unique_representation(const Dictionary& d, int s, const Signal& x) {
  const int n = d.n(), m = d.m(), N = static_cast<int>(x.size());
  for (int i = 0; i < N; ++i) {
    const Vector p = extract_patch(x, i, n);
    std::vector<Vector> reps;
    for (int k = 0; k <= s; ++k)
      for_each_subset(m, k, [&](const std::vector<int>& sub) {
        Vector a = Vector::Zero(m);
        if (!sub.empty()) {
          const Matrix Ds = d.columns(sub);
          if (rank(Ds) < k) return true;
          const Vector c = Ds.colPivHouseholderQr().solve(p);
          if ((Ds * c - p).norm() > 1e-9 * (1.0 + p.norm())) return true;
          for (int t = 0; t < k; ++t) a(sub[t]) = c(t);
        } else if (p.norm() > 1e-12) {
          return true;
        }
        reps.push_back(a);
        return true;
      });
    for (const auto& r : reps)
      if ((r - reps[0]).norm() > 1e-8 * (1.0 + reps[0].norm())) return false;
  }
  return true;
}

// Every feasible Gamma (ellipsoid axis points on each support pattern) obeys the RIP bound.
bool stability_holds(const Dictionary& d, int s, int N, double delta2s, const Signal& x0, const GlobalRep& g0,
                     Rng& rng, double& worst_ratio, int& feasible_patterns) {
  const int m = d.m();
  const Vector flat0 = g0.flat();
  const double eps = 0.2 * x0.norm();
  Vector e = gaussian(N, rng);
  const Signal y = x0 + 0.5 * eps * e / e.norm();
  const double bound = rip_stability_bound(eps, delta2s);
  const Matrix DG = build_bundle(d, N).DG;
  std::vector<std::vector<int>> subsets;
  for_each_subset(m, std::min(s, m), [&](const std::vector<int>& sub) {
    subsets.push_back(sub);
    return true;
  });
  std::vector<std::size_t> odo(static_cast<std::size_t>(N), 0);
  std::vector<std::vector<int>> pattern(static_cast<std::size_t>(N));
  bool ok = true;
  while (true) {
    std::vector<int> cols;
    for (int i = 0; i < N; ++i) {
      pattern[i] = subsets[odo[i]];
      for (int j : pattern[i]) cols.push_back(i * m + j);
    }
    const Kernel ker = kernel(restricted_mstar(d, SupportSequence(pattern, m)));
    if (ker.dim > 0) {
      const Matrix A = select_columns(DG, cols) * ker.basis;
      Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Vector c0 = svd.solve(y);
      const double r2 = (y - A * c0).squaredNorm();
      if (r2 <= eps * eps) {
        ++feasible_patterns;
        std::vector<Vector> pts{c0};
        for (int j = 0; j < svd.singularValues().size(); ++j) {
          const double sv = svd.singularValues()(j);
          if (sv <= 1e-12) continue;  // unbounded direction: covered by delta < 1 failing
          const double t = std::sqrt(eps * eps - r2) / sv;
          pts.push_back(c0 + t * svd.matrixV().col(j));
          pts.push_back(c0 - t * svd.matrixV().col(j));
        }
        for (const auto& c : pts) {
          const Vector g = ker.basis * c;
          Vector full = Vector::Zero(flat0.size());
          for (std::size_t t = 0; t < cols.size(); ++t) full(cols[t]) = g(static_cast<Eigen::Index>(t));
          const double err = (full - flat0).squaredNorm();
          worst_ratio = std::max(worst_ratio, err / bound);
          ok = ok && err <= bound * (1 + 1e-9);
        }
      }
    }
    int pos = N - 1;
    while (pos >= 0 && ++odo[static_cast<std::size_t>(pos)] == subsets.size()) odo[static_cast<std::size_t>(pos--)] = 0;
    if (pos < 0) break;
  }
  return ok;
}

void criterion8() {
  const auto t0 = Clock::now();
  Rng rng(1008);
  std::vector<TinyModel> models;
  for (int t = 0; t < 3; ++t) models.push_back({signature(gaussian(4, rng), 3), 1, 6, true, "signature 3x4"});
  models.push_back({normalize_atoms(heaviside(4)), 2, 6, true, "heaviside 4x4"});
  {
    CoherenceOptimizerOptions opt;
    opt.iterations = 4000;
    opt.seed = 5;
    opt.restarts = 4;
    models.push_back({optimize_signature_coherence(6, 8, opt).dict, 1, 8, false, "optimized signature 6x8"});
  }
  models.push_back({multi_signature(random_multi_signature_spec(4, 4, 2, 3)), 2, 6, false, "multi-signature 4x4"});

  bool pass = true;
  int checks = 0;
  double worst_ratio = 0;
  std::ostringstream os;
  for (const auto& tm : models) {
    const Dictionary& d = tm.dict;
    const int n = d.n(), s = tm.s, N = tm.N;
    const PatchModel model(d, s, N);
    const AllowedSupports T = allowed_supports(model, 2000000);
    bool ok = true;
    auto check = [&](bool cond, const std::string& what) {
      ++checks;
      if (!cond) info(tm.label + ": " + what + " violated");
      ok = ok && cond;
    };
    check(T.exact, "exact allowed-support enumeration");
    const double sig = spark(d).value;
    const double gsig = globalized_spark(d, T).value;
    check(gsig >= sig, "globalized spark >= spark");
    for (int k = 1; k <= std::min(2 * s, d.m()); ++k) {
      const double dk = rip_classical(d, k).value;
      const double dm = rip_globalized(d, T, k).value;
      check(dm <= dk + kOrderSlack, "delta_{k,M} <= delta_k at k=" + std::to_string(k) + " (" + fmt("%.6f", dm) + " vs " + fmt("%.6f", dk) + ")");
      if (tm.generalized && k <= 2) {
        // order-k patterns with M Gamma = 0 live in the allowed supports of the sparsity-k model
        const AllowedSupports Tk = k <= s ? T : allowed_supports(PatchModel(d, k, N), 2000000);
        check(Tk.exact, "exact allowed-support enumeration at sparsity " + std::to_string(k));
        const double dmk = rip_globalized(d, Tk, k).value;
        const double dN = rip_generalized(d, N, k, 1e7).value;
        check(dN <= (dmk + n - 1) / n + kOrderSlack, "delta_k^(N) <= (delta_{k,M}+n-1)/n at k=" + std::to_string(k) + " (" + fmt("%.6f", dN) + " vs " + fmt("%.6f", (dmk + n - 1) / n) + ")");
      }
    }
    bool has_nonempty = false;
    for (const auto& sp : T.T) has_nonempty = has_nonempty || (!sp.empty() && static_cast<int>(sp.size()) <= s);
    if (has_nonempty) {
      const double eta = eta1star(d, T, s).value, mus = babel_mu1(d, s).value + babel_mu1(d, s - 1).value;
      check(eta <= mus + kOrderSlack, "eta1star(s) <= mu1(s)+mu1(s-1) (" + fmt("%.6f", eta) + " vs " + fmt("%.6f", mus) + ")");
    }

    // uniqueness below half the globalized spark, on sampled model signals
    const DependencyGraph g = build_graph(d, s);
    const PathEnumeration walks = enumerate_paths(g, N, 200000);
    int tested = 0;
    std::vector<std::pair<Signal, GlobalRep>> samples;
    for (const auto& S : walks.paths) {
      if (tested >= 25) break;
      if (!is_realizable(S, d, N).realizable) continue;
      const SampledSignal ss = sample_signal(S, d, N, rng);
      if (ss.gamma.l0inf(1e-9) < gsig / 2.0) {
        check(unique_representation(d, s, ss.x), "unique representation below gspark/2");
      }
      samples.emplace_back(ss.x, ss.gamma);
      ++tested;
    }

    // RIP stability over every feasible support pattern
    if (tm.generalized && !samples.empty()) {
      const double d2s = rip_generalized(d, N, 2 * s, 1e7).value;
      if (d2s < 1.0) {
        int feasible = 0;
        const auto& [x0, g0] = samples[rng.below(samples.size())];
        check(stability_holds(d, s, N, d2s, x0, g0, rng, worst_ratio, feasible), "RIP stability bound");
        check(feasible > 0, "a feasible support pattern exists");
      } else {
        info(tm.label + ": delta_2s^(N) = " + fmt("%.4f", d2s) + " >= 1, stability bound vacuous");
      }
    }
    os << tm.label << (ok ? " ok" : " VIOLATED") << " (spark " << sig << ", gspark " << gsig << "); ";
    pass = pass && ok;
  }
  const double dt = seconds_since(t0);
  os << checks << " checks, worst stability ratio " << fmt("%.3f", worst_ratio) << ", " << fmt("%.1f s", dt);
  report(8, pass && dt < kBudget8, "model-measure consistency on exhaustive tiny instances", os.str());
}

// ---------------------------------------------------------------------------
void criterion9() {
  Rng rng(1009);
  std::ostringstream os;
  // signature graph at s = 1
  const Dictionary d = signature(gaussian(10, rng), 6);
  const DependencyGraph g = build_graph(d, 1);
  int nonempty = 0;
  bool cycle = true;
  std::vector<int> out_deg(g.nodes.size(), 0), in_deg(g.nodes.size(), 0);
  for (auto [a, b] : g.edges) {
    if (g.nodes[a].empty() || g.nodes[b].empty()) continue;
    ++nonempty;
    ++out_deg[a];
    ++in_deg[b];
    cycle = cycle && (g.nodes[a][0] + 1) % 10 == g.nodes[b][0];
  }
  for (std::size_t v = 1; v < g.nodes.size(); ++v) cycle = cycle && out_deg[v] == 1 && in_deg[v] == 1;
  const bool graph_ok = g.nodes.size() == 11 && nonempty == 10 && cycle;
  os << "graph: " << (g.nodes.size() - 1) << " nodes, " << nonempty << " edges" << (cycle ? ", one cycle" : "");

  const PathEnumeration walks = enumerate_paths(g, 30);
  bool walks_ok = !walks.truncated && !walks.paths.empty();
  for (const auto& S : walks.paths) {
    const Realizability rz = is_realizable(S, d, 30);
    walks_ok = walks_ok && rz.realizable && rz.dim == 1;
  }
  os << "; " << walks.paths.size() << " closed walks, all dim 1: " << (walks_ok ? "yes" : "no");

  // scalar-transfer cycle realized
  bool realize_ok = true;
  for (int t = 0; t < 3; ++t) {
    const int m = 7 + t, n = 5;
    DependencyGraph c;
    c.m = m;
    c.s = 1;
    c.nodes.push_back({});
    for (int j = 0; j < m; ++j) c.nodes.push_back({j});
    for (int j = 0; j < m; ++j) {
      c.edges.push_back({j + 1, (j + 1) % m + 1});
      c.transfer[{j + 1, (j + 1) % m + 1}] = Matrix::Constant(1, 1, 0.5 + rng.uniform());
    }
    RealizeOptions opt;
    opt.seed = 100 + t;
    const Dictionary r = realize_graph(c, n, opt);
    const DependencyGraph back = build_graph(r, 1);
    for (auto [a, b] : c.edges) realize_ok = realize_ok && back.has_edge(c.nodes[a], c.nodes[b]);
  }
  os << "; realized cycles contain the input: " << (realize_ok ? "yes" : "no");

  // multi-signature: dim ker A_S <= k on every closed walk of the transfer subgraph
  bool bound_ok = true;
  int paths = 0;
  for (int t = 0; t < 4; ++t) {
    const int n = 8, s = 2, r = 4 + t % 2, N = 2 * r * 2;
    const Dictionary ms = multi_signature(random_multi_signature_spec(n, r * s, s, 200 + t));
    const DependencyGraph tg = transfer_subgraph(ms, build_graph(ms, s), s);
    const PathEnumeration pw = enumerate_paths(tg, N);
    for (const auto& S : pw.paths) {
      const int dim = is_realizable(S, ms, N).dim;
      bound_ok = bound_ok && dim <= dim_bound_transfer(S, tg) && dim_bound_transfer(S, tg) <= s;
      ++paths;
    }
  }
  bound_ok = bound_ok && paths > 0;
  os << "; transfer bound on " << paths << " multi-signature walks: " << (bound_ok ? "holds" : "violated");
  report(9, graph_ok && walks_ok && realize_ok && bound_ok, "graph pipeline", os.str());
}

}  // namespace

// Optional arguments select criteria by number; default runs all.
int main(int argc, char** argv) {
  const std::vector<std::function<void()>> all{criterion1, criterion2, criterion3, criterion4, criterion5,
                                               criterion6, criterion7, criterion8, criterion9};
  std::vector<bool> run(all.size(), argc < 2);
  for (int a = 1; a < argc; ++a) {
    const int id = std::atoi(argv[a]);
    if (id >= 1 && id <= static_cast<int>(all.size())) run[static_cast<std::size_t>(id - 1)] = true;
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!run[i]) continue;
    try {
      all[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, "exception", e.what());
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures;
}
