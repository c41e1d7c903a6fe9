#pragma once

#include "patchsparse/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace patchsparse {

struct OmpResult {
  Vector coef;               // length m, exactly |support| nonzeros at most
  std::vector<int> support;  // in selection order
  double residual_norm = 0.0;
};

/// Orthogonal matching pursuit. Each step picks the column maximizing
/// |<d_j, r>| / ||d_j|| (lowest index on ties) and re-solves least squares on
/// the selected set. Stops after K atoms, when ||r|| <= res_tol, or when no
/// independent column is left. A non-positive res_tol means 1e-10 * ||y||.
OmpResult omp(const Matrix& D, const Vector& y, int K, double res_tol = 0.0);

/// Estimate returned by every pursuit.
struct PursuitResult {
  Signal xhat;
  GlobalRep gamma;
  SupportSequence support;
  int iterations = 0;
  double residual_norm = 0.0;      // ||y - xhat||
  double overlap_violation = 0.0;  // ||M_star gamma||_inf
  bool projected = false;
  bool warning = false;            // projection skipped (non-minimal support)
  std::string message;
};

struct LpaOptions {
  /// Per-patch OMP residual threshold; 0 keeps sparsity-targeted stopping.
  double patch_res_tol = 0.0;
};

/// Local patch averaging: per-patch OMP with K = s, then overlap averaging.
PursuitResult lpa(const PatchModel& model, const Signal& y, const LpaOptions& opt = {});

enum class ProjectionMode { iterative, direct };

/// Orthogonal projection of y onto ker A_S. Iterative mode repeats the patch
/// averaging with fixed supports and stops when the geometric tail estimate of
/// the remaining distance drops below tol.
Signal oracle_project(const Signal& y, const SupportSequence& S, const Dictionary& dict,
                      ProjectionMode mode = ProjectionMode::direct, double tol = 1e-10, int max_iters = 10000);

/// Direct projection onto ker A_S.
Signal project_to_model(const Signal& y, const SupportSequence& S, const Dictionary& dict);

/// Projected variant of a pursuit result: xhat onto ker A_support, codes
/// refit on the support. Falls back to the input with warning=true when the
/// support is not minimal.
PursuitResult project_result(const PursuitResult& r, const Signal& y, const Dictionary& dict);

struct QompOptions {
  std::optional<int> k_global;  // total atom budget; defaults to s * N
  bool per_patch_cap = true;    // stop growing a patch once it holds s atoms
  bool project = true;
  double res_tol = 0.0;         // absolute; 0 means 1e-10 * ||y||
};

/// Global OMP over Q_beta = [D_G; beta M_star] with target [y; 0], followed
/// by projection onto ker A of the recovered support.
PursuitResult qomp(const PatchModel& model, const Signal& y, double beta, const QompOptions& opt = {});

/// The atom selection order of the global OMP inside qomp (for inspection).
std::vector<int> qomp_selection(const PatchModel& model, const Signal& y, double beta, const QompOptions& opt = {});

struct AdmmOptions {
  double rho = 1.0;
  int outer_iters = 300;
  double tol = 1e-6;
  // penalty continuation: after each sweep rho *= rho_growth (scaled dual rescaled), capped at rho_max.
  // 1.0 keeps rho fixed.
  double rho_growth = 1.0;
  double rho_max = 1e6;
};

/// ADMM pursuit for min sum_i ||R_i y - D alpha_i||^2 subject to
/// S_B D alpha_i = S_T D alpha_{i+1} and ||alpha_i||_0 <= s.
PursuitResult admm_pursuit(const PatchModel& model, const Signal& y, const AdmmOptions& opt = {});

enum class Algorithm { lpa, qomp, admm, oracle };
std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);

}  // namespace patchsparse
