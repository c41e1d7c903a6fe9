#include "patchsparse/bench.hpp"

#include "patchsparse/dictionaries.hpp"
#include "patchsparse/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace patchsparse {

Signal add_noise(const Signal& x, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw DimensionError("noise level must be nonnegative");
  if (sigma == 0.0) return x;
  Signal y = x;
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sigma * rng.normal();
  return y;
}

Signal add_noise(const Signal& x, double sigma, std::uint64_t seed) {
  Rng rng(seed, 0);
  return add_noise(x, sigma, rng);
}

double mse(const Signal& a, const Signal& b) {
  if (a.size() != b.size()) throw DimensionError("mse: length mismatch");
  if (a.size() == 0) return 0.0;
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

// ---------------------------------------------------------------------------
// exact rationals

namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("rational arithmetic overflow");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("rational arithmetic overflow");
  return r;
}

}  // namespace

Rational::Rational(std::int64_t p, std::int64_t q) {
  if (q == 0) throw DomainError("zero denominator");
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
  num = g ? p / g : 0;
  den = g ? q / g : 1;
}

Rational Rational::operator+(const Rational& o) const {
  const std::int64_t g = std::gcd(den, o.den);
  const std::int64_t l = checked_mul(den / g, o.den);
  return {checked_add(checked_mul(num, l / den), checked_mul(o.num, l / o.den)), l};
}

Rational Rational::operator*(const Rational& o) const {
  return {checked_mul(num, o.num), checked_mul(den, o.den)};
}

// ---------------------------------------------------------------------------
// PWC theory

namespace {

void check_pixel_args(int n, int alpha, int k) {
  if (n < 2) throw DimensionError("patch length must be >= 2");
  if (alpha < 1) throw DimensionError("segment length must be >= 1");
  if (k < 0 || k >= alpha) throw DimensionError("pixel index must lie in [0, alpha)");
}

// Patch j (1..n) sees the segment pixels at offsets [a_j, b_j] around the pixel.
std::pair<int, int> patch_range(int n, int alpha, int k, int j) {
  return {-std::min(k, n - j), std::min(alpha - k - 1, j - 1)};
}

}  // namespace

std::vector<Rational> pwc_pixel_coefficients_exact(int n, int alpha, int k) {
  check_pixel_args(n, alpha, k);
  std::vector<Rational> c(static_cast<std::size_t>(alpha), Rational(0, 1));
  for (int j = 1; j <= n; ++j) {
    const auto [a, b] = patch_range(n, alpha, k, j);
    const Rational w(1, checked_mul(n, b - a + 1));
    for (int i = a; i <= b; ++i) c[static_cast<std::size_t>(i + k)] = c[static_cast<std::size_t>(i + k)] + w;
  }
  return c;
}

Vector pwc_pixel_coefficients(int n, int alpha, int k) {
  check_pixel_args(n, alpha, k);
  Vector c = Vector::Zero(alpha);
  for (int j = 1; j <= n; ++j) {
    const auto [a, b] = patch_range(n, alpha, k, j);
    const double w = 1.0 / (static_cast<double>(n) * (b - a + 1));
    c.segment(a + k, b - a + 1).array() += w;
  }
  return c;
}

double R_coefficient_sum(int n, int alpha) {
  double total = 0.0;
  for (int k = 0; k < alpha; ++k) total += pwc_pixel_coefficients(n, alpha, k).squaredNorm();
  return total;
}

std::optional<double> R_closed_form(int n, int alpha) {
  if (n < 2 || alpha < 1) throw DimensionError("R(n, alpha) needs n >= 2 and alpha >= 1");
  const double a = alpha, nn = n;
  if (n >= alpha) {
    double h2 = 0.0;
    for (int i = 1; i <= alpha; ++i) h2 += 1.0 / (static_cast<double>(i) * i);
    return 1.0 + (a * (2.0 * a * h2 - 3.0 * a + 2.0) - 1.0) / (nn * nn);
  }
  if (2 * n <= alpha) return 11.0 / 18.0 + 2.0 * a / (3.0 * nn) - 5.0 / (18.0 * nn * nn) + (a - 1.0) / (3.0 * nn * nn * nn);
  return std::nullopt;
}

double R_theory(int n, int alpha) {
  const double r = R_coefficient_sum(n, alpha);
  if (const auto cf = R_closed_form(n, alpha)) {
    if (std::abs(*cf - r) > 1e-10 * std::max(1.0, std::abs(r)))
      throw std::logic_error("R(n, alpha) closed form disagrees with the coefficient sum");
  }
  return r;
}

double lpa_pwc_mse_theory(int n, const std::vector<int>& segment_lengths, double sigma) {
  if (segment_lengths.empty()) throw DimensionError("at least one segment is required");
  if (!(sigma >= 0.0)) throw DimensionError("noise level must be nonnegative");
  double total = 0.0;
  for (int l : segment_lengths) total += R_theory(n, l);
  return sigma * sigma * total;
}

// ---------------------------------------------------------------------------
// PWC signals

SupportSequence heaviside_supports(const std::vector<int>& jumps, int N, int n) {
  std::vector<std::vector<int>> sup(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    auto& s = sup[static_cast<std::size_t>(i)];
    for (int b : jumps) {
      const int d = ((b - i) % N + N) % N;
      if (d >= 1 && d <= n - 1) s.push_back(d - 1);
    }
    s.push_back(n - 1);
  }
  return SupportSequence(std::move(sup), n);
}

PwcSignal pwc_from_jumps(const std::vector<int>& jumps, const std::vector<double>& heights, int N, int n) {
  if (N < n || n < 2) throw DimensionError("need N >= n >= 2");
  const std::size_t J = jumps.size();
  if (heights.size() != std::max<std::size_t>(J, 1)) throw DimensionError("one height per segment is required");
  if (!std::is_sorted(jumps.begin(), jumps.end()) || std::adjacent_find(jumps.begin(), jumps.end()) != jumps.end())
    throw DimensionError("jump positions must be strictly increasing");
  for (int b : jumps)
    if (b < 0 || b >= N) throw DimensionError("jump position out of range");
  PwcSignal out;
  out.x = Signal::Constant(N, heights[0]);
  out.jumps = jumps;
  if (J > 0) {
    for (std::size_t r = 0; r < J; ++r) {
      const int start = jumps[r];
      const int end = r + 1 < J ? jumps[r + 1] : jumps[0] + N;
      out.lengths.push_back(end - start);
      for (int p = start; p < end; ++p) out.x(p % N) = heights[r];
    }
  } else {
    out.lengths.push_back(N);
  }
  out.support = heaviside_supports(jumps, N, n);
  out.gamma = GlobalRep(n, N);
  for (int i = 0; i < N; ++i) {
    const Vector p = extract_patch(out.x, i, n);
    for (int t : out.support[i]) out.gamma.block(i)(t) = t == n - 1 ? p(n - 1) : p(t) - p(t + 1);
  }
  return out;
}

PwcSignal random_pwc(int N, int n, int segments, int min_gap, Rng& rng) {
  if (segments < 1) throw DimensionError("at least one segment is required");
  if (segments == 1) return pwc_from_jumps({}, {rng.normal()}, N, n);
  if (static_cast<long>(segments) * min_gap > N) throw DimensionError("segments do not fit with the minimum gap");
  const int slack = N - segments * min_gap;
  std::vector<int> cuts(static_cast<std::size_t>(segments - 1));
  for (auto& c : cuts) c = static_cast<int>(rng.below(static_cast<std::uint64_t>(slack) + 1));
  std::sort(cuts.begin(), cuts.end());
  const int offset = static_cast<int>(rng.below(static_cast<std::uint64_t>(N)));
  std::vector<int> jumps;
  int pos = offset, prev_cut = 0;
  for (int r = 0; r < segments; ++r) {
    jumps.push_back(pos % N);
    const int cut = r < segments - 1 ? cuts[static_cast<std::size_t>(r)] : slack;
    pos += min_gap + (cut - prev_cut);
    prev_cut = cut;
  }
  std::sort(jumps.begin(), jumps.end());
  std::vector<double> heights(static_cast<std::size_t>(segments));
  for (auto& h : heights) h = rng.normal();
  return pwc_from_jumps(jumps, heights, N, n);
}

// ---------------------------------------------------------------------------
// configuration

namespace {

using nlohmann::json;

Algorithm parse_algo(const std::string& name) {
  try {
    return algorithm_from_string(name);
  } catch (const DimensionError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    if (j.contains("model")) {
      const json& m = j.at("model");
      c.kind = m.value("kind", c.kind);
      c.n = m.value("n", c.n);
      c.m = m.value("m", c.kind == "heaviside" ? c.n : c.m);
      c.N = m.value("N", c.N);
      c.segments = m.value("segments", c.segments);
      if (m.contains("base")) c.base = m.at("base").get<std::vector<double>>();
    }
    if (j.contains("optimizer")) {
      const json& o = j.at("optimizer");
      c.optimizer_iterations = o.value("iterations", c.optimizer_iterations);
      c.optimizer_step = o.value("step", c.optimizer_step);
      c.optimizer_restarts = o.value("restarts", c.optimizer_restarts);
      c.optimizer_target = o.value("target", c.optimizer_target);
      c.dict_seed = o.value("seed", c.dict_seed);
    }
    if (j.contains("sparsities")) c.sparsities = j.at("sparsities").get<std::vector<int>>();
    if (j.contains("sigmas")) c.sigmas = j.at("sigmas").get<std::vector<double>>();
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.outputs = j.value("outputs", c.outputs);
    if (j.contains("algorithms")) {
      for (const json& a : j.at("algorithms")) {
        AlgorithmSpec spec;
        spec.algo = parse_algo(a.at("name").get<std::string>());
        if (a.contains("betas")) spec.betas = a.at("betas").get<std::vector<double>>();
        if (a.contains("beta")) spec.betas = {a.at("beta").get<double>()};
        spec.k_global_sN = a.value("k_global", std::string("true_count")) == "sN";
        spec.admm.rho = a.value("rho", spec.admm.rho);
        spec.admm.outer_iters = a.value("iterations", spec.admm.outer_iters);
        spec.admm.tol = a.value("tol", spec.admm.tol);
        spec.admm.rho_growth = a.value("rho_growth", spec.admm.rho_growth);
        spec.admm.rho_max = a.value("rho_max", spec.admm.rho_max);
        c.algorithms.push_back(spec);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid experiment configuration: ") + e.what());
  }
  if (c.kind == "heaviside") c.m = c.n;
  c.validate();
  return c;
}

json ExperimentConfig::to_json() const {
  json algos = json::array();
  for (const auto& a : algorithms) {
    json o{{"name", to_string(a.algo)}};
    if (a.algo == Algorithm::qomp) {
      o["betas"] = a.betas;
      o["k_global"] = a.k_global_sN ? "sN" : "true_count";
    }
    if (a.algo == Algorithm::admm) {
      o["rho"] = a.admm.rho;
      o["iterations"] = a.admm.outer_iters;
      o["tol"] = a.admm.tol;
      o["rho_growth"] = a.admm.rho_growth;
      o["rho_max"] = a.admm.rho_max;
    }
    algos.push_back(o);
  }
  json model{{"kind", kind}, {"n", n}, {"m", m}, {"N", N}, {"segments", segments}};
  if (base) model["base"] = *base;
  return json{{"model", model},
              {"optimizer",
               {{"iterations", optimizer_iterations},
                {"step", optimizer_step},
                {"restarts", optimizer_restarts},
                {"target", optimizer_target},
                {"seed", dict_seed}}},
              {"sparsities", sparsities},
              {"algorithms", algos},
              {"sigmas", sigmas},
              {"trials", trials},
              {"seed", seed},
              {"outputs", outputs}};
}

void ExperimentConfig::validate() const {
  if (kind != "signature" && kind != "heaviside") throw ConfigError("model kind must be signature or heaviside");
  if (n < 2) throw ConfigError("patch length n must be >= 2");
  if (m < 1) throw ConfigError("atom count m must be >= 1");
  if (N < n) throw ConfigError("signal length N must be >= n");
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (sigmas.empty()) throw ConfigError("sigma grid is empty");
  for (double s : sigmas)
    if (!(s >= 0.0)) throw ConfigError("sigma values must be nonnegative");
  if (sparsities.empty()) throw ConfigError("no sparsity levels given");
  for (int s : sparsities)
    if (s < 1 || s >= n || s > m) throw ConfigError("sparsity must lie in [1, min(n-1, m)]");
  if (algorithms.empty()) throw ConfigError("no algorithms given");
  for (const auto& a : algorithms) {
    if (a.algo == Algorithm::qomp) {
      if (a.betas.empty()) throw ConfigError("qomp needs at least one beta");
      for (double b : a.betas)
        if (!(b > 0.0)) throw ConfigError("beta must be positive");
    }
    if (a.algo == Algorithm::admm && (!(a.admm.rho > 0.0) || a.admm.outer_iters < 1 || !(a.admm.tol > 0.0) ||
                                      !(a.admm.rho_growth >= 1.0) || !(a.admm.rho_max >= a.admm.rho)))
      throw ConfigError("admm needs rho > 0, iterations >= 1, tol > 0, rho_growth >= 1, rho_max >= rho");
  }
  if (kind == "signature") {
    if (N % m != 0) throw ConfigError("signature experiments need N to be a multiple of m");
    if (base && static_cast<int>(base->size()) != m) throw ConfigError("base length must equal m");
    if (optimizer_iterations < 0 || optimizer_restarts < 1) throw ConfigError("invalid optimizer settings");
  } else {
    if (m != n) throw ConfigError("heaviside experiments need m = n");
    if (segments < 1 || static_cast<long>(segments) * n > N) throw ConfigError("segments * n must not exceed N");
    for (int s : sparsities)
      if (s < 2 && segments > 1) throw ConfigError("PWC signals with jumps need sparsity >= 2");
  }
}

namespace {

struct ExperimentDictionary {
  Dictionary dict;
  Vector base;
};

ExperimentDictionary build_dictionary(const ExperimentConfig& cfg) {
  if (cfg.kind == "heaviside") return {heaviside(cfg.n), Vector()};
  if (cfg.base) {
    const Vector b = Eigen::Map<const Vector>(cfg.base->data(), static_cast<Eigen::Index>(cfg.base->size()));
    return {signature(b, cfg.n), b};
  }
  CoherenceOptimizerOptions opt;
  opt.iterations = cfg.optimizer_iterations;
  opt.step = cfg.optimizer_step;
  opt.restarts = cfg.optimizer_restarts;
  opt.target = cfg.optimizer_target;
  opt.seed = cfg.dict_seed;
  CoherenceOptimizerResult r = optimize_signature_coherence(cfg.n, cfg.m, opt);
  return {std::move(r.dict), std::move(r.base)};
}

void run_parallel(std::size_t count, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(worker_threads()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t trial_stream(int sparsity, int trial) {
  return (static_cast<std::uint64_t>(sparsity) << 32) | static_cast<std::uint32_t>(trial);
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

ResultRecord make_record(const std::string& algo, double beta, bool projected, double sigma, int sparsity, int trial,
                         const TrialSignal& truth, const PursuitResult& r, double ms) {
  ResultRecord rec;
  rec.algo = algo;
  rec.beta = beta;
  rec.projected = projected;
  rec.sigma = sigma;
  rec.sparsity = sparsity;
  rec.trial = trial;
  rec.mse = mse(r.xhat, truth.x);
  rec.gamma_error = (r.gamma.blocks() - truth.gamma.blocks()).norm();
  rec.support_exact = r.support == truth.support;
  rec.overlap_violation = r.overlap_violation;
  rec.runtime_ms = ms;
  return rec;
}

// Runs one configured algorithm on y; returns (raw, beta) pairs.
std::vector<std::pair<PursuitResult, double>> run_algorithm(const AlgorithmSpec& spec, const PatchModel& model,
                                                            const Signal& y, const TrialSignal& truth,
                                                            std::vector<double>& times) {
  std::vector<std::pair<PursuitResult, double>> out;
  const auto t0 = std::chrono::steady_clock::now();
  switch (spec.algo) {
    case Algorithm::lpa:
      out.emplace_back(lpa(model, y), 0.0);
      times.push_back(elapsed_ms(t0));
      break;
    case Algorithm::qomp:
      for (double beta : spec.betas) {
        const auto tb = std::chrono::steady_clock::now();
        QompOptions opt;
        opt.project = false;
        opt.k_global = spec.k_global_sN ? model.s() * model.N() : truth.support.total_size();
        out.emplace_back(qomp(model, y, beta, opt), beta);
        times.push_back(elapsed_ms(tb));
      }
      break;
    case Algorithm::admm:
      out.emplace_back(admm_pursuit(model, y, spec.admm), 0.0);
      times.push_back(elapsed_ms(t0));
      break;
    case Algorithm::oracle: {
      PursuitResult r;
      r.support = truth.support;
      r.xhat = project_to_model(y, truth.support, model.dict());
      r.gamma = codes_on_support(model.dict(), truth.support, r.xhat);
      r.overlap_violation = overlap_violation(model.dict(), r.gamma);
      r.residual_norm = (y - r.xhat).norm();
      r.projected = true;
      out.emplace_back(std::move(r), 0.0);
      times.push_back(elapsed_ms(t0));
      break;
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

Dictionary experiment_dictionary(const ExperimentConfig& cfg) { return build_dictionary(cfg).dict; }

TrialSignal experiment_signal(const ExperimentConfig& cfg, const Dictionary& dict, const Vector& base, int sparsity,
                              Rng& rng) {
  TrialSignal t;
  if (cfg.kind == "heaviside") {
    PwcSignal p = random_pwc(cfg.N, cfg.n, cfg.segments, cfg.n, rng);
    t = {std::move(p.x), std::move(p.support), std::move(p.gamma)};
  } else {
    std::vector<int> pool(static_cast<std::size_t>(cfg.m));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> shifts;
    std::vector<double> weights;
    for (int j = 0; j < sparsity; ++j) {
      const auto pick = static_cast<std::size_t>(rng.below(pool.size()));
      shifts.push_back(pool[pick]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      weights.push_back(rng.normal());
    }
    SignatureSignal s = signature_signal(dict, base, cfg.N, shifts, weights);
    t = {std::move(s.x), std::move(s.support), std::move(s.gamma)};
  }
  const double scale = 1.0 + t.x.cwiseAbs().maxCoeff();
  if ((synthesize(dict, t.gamma) - t.x).cwiseAbs().maxCoeff() > 1e-9 * scale ||
      overlap_violation(dict, t.gamma) > 1e-9 * scale * dict.n())
    throw std::runtime_error("generated signal is not a member of the model");
  return t;
}

std::vector<ResultRecord> recovery_records(const ExperimentConfig& cfg) {
  cfg.validate();
  const ExperimentDictionary ed = build_dictionary(cfg);
  const std::size_t S = cfg.sparsities.size(), T = static_cast<std::size_t>(cfg.trials);
  std::vector<std::vector<ResultRecord>> slots(S * T);
  run_parallel(S * T, [&](std::size_t idx) {
    const int sparsity = cfg.sparsities[idx / T];
    const int trial = static_cast<int>(idx % T);
    Rng rng = Rng(cfg.seed).fork(trial_stream(sparsity, trial));
    const TrialSignal truth = experiment_signal(cfg, ed.dict, ed.base, sparsity, rng);
    const PatchModel model(ed.dict, sparsity, cfg.N);
    for (const auto& spec : cfg.algorithms) {
      std::vector<double> times;
      const auto results = run_algorithm(spec, model, truth.x, truth, times);
      for (std::size_t r = 0; r < results.size(); ++r)
        slots[idx].push_back(make_record(to_string(spec.algo), results[r].second, false, 0.0, sparsity, trial, truth,
                                         results[r].first, times[r]));
    }
  });
  std::vector<ResultRecord> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::string run_recovery(const ExperimentConfig& cfg) {
  const auto records = recovery_records(cfg);
  // keyed by first appearance order
  std::vector<std::tuple<std::string, double, int>> keys;
  std::map<std::tuple<std::string, double, int>, std::pair<int, int>> tally;
  for (const auto& r : records) {
    const auto key = std::make_tuple(r.algo, r.beta, r.sparsity);
    if (!tally.count(key)) keys.push_back(key);
    auto& t = tally[key];
    t.first += r.support_exact ? 1 : 0;
    t.second += 1;
  }
  std::ostringstream os;
  os << "algo,beta,sparsity,success_rate,trials,seed\n";
  for (const auto& key : keys) {
    const auto [hits, n] = tally[key];
    os << std::get<0>(key) << ',' << fmt(std::get<1>(key)) << ',' << std::get<2>(key) << ','
       << fmt(static_cast<double>(hits) / n) << ',' << n << ',' << cfg.seed << '\n';
  }
  return os.str();
}

std::vector<ResultRecord> denoising_records(const ExperimentConfig& cfg) {
  cfg.validate();
  const ExperimentDictionary ed = build_dictionary(cfg);
  const std::size_t S = cfg.sparsities.size(), T = static_cast<std::size_t>(cfg.trials), G = cfg.sigmas.size();
  std::vector<std::vector<ResultRecord>> slots(S * T * G);
  run_parallel(S * T * G, [&](std::size_t idx) {
    const int sparsity = cfg.sparsities[idx / (T * G)];
    const int trial = static_cast<int>((idx / G) % T);
    const std::size_t g = idx % G;
    const double sigma = cfg.sigmas[g];
    const Rng base_rng = Rng(cfg.seed).fork(trial_stream(sparsity, trial));
    Rng signal_rng = base_rng.fork(0);
    const TrialSignal truth = experiment_signal(cfg, ed.dict, ed.base, sparsity, signal_rng);
    Rng noise_rng = base_rng.fork(1 + g);
    const Signal y = add_noise(truth.x, sigma, noise_rng);
    const PatchModel model(ed.dict, sparsity, cfg.N);
    auto& out = slots[idx];
    for (const auto& spec : cfg.algorithms) {
      std::vector<double> times;
      const auto results = run_algorithm(spec, model, y, truth, times);
      const std::string name = to_string(spec.algo);
      for (std::size_t r = 0; r < results.size(); ++r) {
        const auto& [res, beta] = results[r];
        if (spec.algo == Algorithm::oracle) {
          out.push_back(make_record(name, beta, true, sigma, sparsity, trial, truth, res, times[r]));
          continue;
        }
        out.push_back(make_record(name, beta, false, sigma, sparsity, trial, truth, res, times[r]));
        const auto t0 = std::chrono::steady_clock::now();
        const PursuitResult proj = project_result(res, y, model.dict());
        out.push_back(make_record(name, beta, true, sigma, sparsity, trial, truth, proj, elapsed_ms(t0)));
      }
    }
  });
  std::vector<ResultRecord> out;
  for (auto& s : slots) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::string run_denoising(const ExperimentConfig& cfg) {
  const auto records = denoising_records(cfg);
  using Key = std::tuple<std::string, double, bool, double, int>;
  struct Acc {
    int n = 0;
    double mse = 0, gerr = 0, exact = 0, viol = 0;
  };
  std::vector<Key> keys;
  std::map<Key, Acc> acc;
  for (const auto& r : records) {
    const Key key{r.algo, r.beta, r.projected, r.sigma, r.sparsity};
    if (!acc.count(key)) keys.push_back(key);
    Acc& a = acc[key];
    ++a.n;
    a.mse += r.mse;
    a.gerr += r.gamma_error;
    a.exact += r.support_exact ? 1.0 : 0.0;
    a.viol += r.overlap_violation;
  }
  std::stable_sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
    return std::tie(std::get<4>(a), std::get<3>(a)) < std::tie(std::get<4>(b), std::get<3>(b));
  });
  std::ostringstream os;
  os << "algo,beta,projected,sigma,sparsity,trials,mean_mse,mean_gamma_error,support_exact_rate,mean_overlap_violation\n";
  for (const auto& key : keys) {
    const Acc& a = acc[key];
    os << std::get<0>(key) << ',' << fmt(std::get<1>(key)) << ',' << (std::get<2>(key) ? 1 : 0) << ','
       << fmt(std::get<3>(key)) << ',' << std::get<4>(key) << ',' << a.n << ',' << fmt(a.mse / a.n) << ','
       << fmt(a.gerr / a.n) << ',' << fmt(a.exact / a.n) << ',' << fmt(a.viol / a.n) << '\n';
  }
  return os.str();
}

int worker_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("PATCHSPARSE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) hw = std::min(hw, cap);
  }
  return hw;
}

}  // namespace patchsparse
