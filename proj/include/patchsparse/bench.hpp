#pragma once

#include "patchsparse/core.hpp"
#include "patchsparse/pursuit.hpp"
#include "patchsparse/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace patchsparse {

/// y = x + sigma * z with z i.i.d. standard normal from Rng(seed, 0).
Signal add_noise(const Signal& x, double sigma, std::uint64_t seed);
Signal add_noise(const Signal& x, double sigma, Rng& rng);

/// Per-sample mean squared error (1/N) ||a - b||^2.
double mse(const Signal& a, const Signal& b);

/// Reduced fraction with 64-bit parts (throws std::overflow_error).
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  Rational() = default;
  Rational(std::int64_t p, std::int64_t q);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  Rational operator+(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  bool operator==(const Rational& o) const = default;
};

/// Weights of the noise samples z_i, i = -k .. alpha-k-1, in the patch-averaged
/// estimate of pixel k (0-based) of a constant segment of length alpha, with
/// oracle supports and patch length n. Ordered by increasing i.
std::vector<Rational> pwc_pixel_coefficients_exact(int n, int alpha, int k);
Vector pwc_pixel_coefficients(int n, int alpha, int k);

/// sum_k sum_i c_{i,alpha,n,k}^2 by direct summation.
double R_coefficient_sum(int n, int alpha);

/// Closed form when n >= alpha or n <= alpha/2; empty in between.
std::optional<double> R_closed_form(int n, int alpha);

/// R(n, alpha) by coefficient summation, cross-checked against the closed form
/// (std::logic_error when they differ by more than 1e-10).
double R_theory(int n, int alpha);

/// sigma^2 sum_r R(n, l_r): expected squared error of patch averaging with
/// oracle supports on a piecewise-constant signal.
double lpa_pwc_mse_theory(int n, const std::vector<int>& segment_lengths, double sigma);

/// Piecewise-constant signal with Heaviside codes. A jump at b means
/// x[b-1] != x[b]; segment r spans [b_r, b_{r+1}) cyclically.
struct PwcSignal {
  Signal x;
  std::vector<int> jumps;
  std::vector<int> lengths;
  SupportSequence support;
  GlobalRep gamma;
};

/// Builds x from sorted jump positions and one height per segment (segment r
/// starts at jumps[r]); codes refer to heaviside(n).
PwcSignal pwc_from_jumps(const std::vector<int>& jumps, const std::vector<double>& heights, int N, int n);

/// Random PWC signal: `segments` jumps with cyclic gaps >= min_gap (uniform
/// composition of the slack), uniform offset, standard-normal heights.
PwcSignal random_pwc(int N, int n, int segments, int min_gap, Rng& rng);

/// Oracle Heaviside supports of a PWC signal: the jump atoms inside each
/// patch plus the constant atom n-1.
SupportSequence heaviside_supports(const std::vector<int>& jumps, int N, int n);

/// Experiment description; see README for the JSON layout.
struct AlgorithmSpec {
  Algorithm algo = Algorithm::lpa;
  std::vector<double> betas{1.0};  // qomp
  bool k_global_sN = false;         // qomp: inject s*N instead of the true count
  AdmmOptions admm;
};

struct ExperimentConfig {
  std::string kind = "signature";  // signature | heaviside
  int n = 15, m = 20, N = 100;
  std::vector<int> sparsities{1, 2, 3, 4};
  int segments = 8;                 // heaviside: segments per signal
  std::optional<std::vector<double>> base;  // signature: explicit base
  int optimizer_iterations = 10000;
  double optimizer_step = 0.01;
  int optimizer_restarts = 1;
  double optimizer_target = 0.0;
  std::uint64_t dict_seed = 7;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<double> sigmas{0.0};
  int trials = 100;
  std::uint64_t seed = 1;
  std::string outputs;  // directory for CSV files; empty = none

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;  // throws ConfigError
};

/// Dictionary used by a configuration (optimized signature or Heaviside).
Dictionary experiment_dictionary(const ExperimentConfig& cfg);

struct ResultRecord {
  std::string algo;  // lpa, qomp, admm, oracle
  double beta = 0.0;
  bool projected = false;
  double sigma = 0.0;
  int sparsity = 0;
  int trial = 0;
  double mse = 0.0;
  double gamma_error = 0.0;
  bool support_exact = false;
  double overlap_violation = 0.0;
  double runtime_ms = 0.0;
};

/// Clean model signal for a trial; throws when the generated signal fails the
/// model membership check.
struct TrialSignal {
  Signal x;
  SupportSequence support;
  GlobalRep gamma;
};
TrialSignal experiment_signal(const ExperimentConfig& cfg, const Dictionary& dict, const Vector& base, int sparsity,
                              Rng& rng);

/// Noiseless recovery: per sparsity and algorithm, the fraction of trials with
/// exact support-sequence recovery (compared before projection).
std::vector<ResultRecord> recovery_records(const ExperimentConfig& cfg);
std::string run_recovery(const ExperimentConfig& cfg);

/// Denoising: per trial and sigma, every algorithm and its projected variant
/// plus the oracle projection.
std::vector<ResultRecord> denoising_records(const ExperimentConfig& cfg);
std::string run_denoising(const ExperimentConfig& cfg);

/// Worker count: hardware concurrency capped by PATCHSPARSE_THREADS.
int worker_threads();

}  // namespace patchsparse
