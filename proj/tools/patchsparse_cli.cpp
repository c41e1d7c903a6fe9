#include "patchsparse/bench.hpp"
#include "patchsparse/dictionaries.hpp"
#include "patchsparse/errors.hpp"
#include "patchsparse/graphmodel.hpp"
#include "patchsparse/io.hpp"
#include "patchsparse/measures.hpp"
#include "patchsparse/pursuit.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

using namespace patchsparse;
using nlohmann::json;

namespace {

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text_file(out, text);
}

void emit_json(const std::string& out, const json& j) { emit(out, j.dump(2) + "\n"); }

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    try {
      out.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      throw ConfigError("not an integer list: " + text);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patch-sparse signal model toolkit"};
  app.require_subcommand(1);

  // gen-dict
  std::string kind = "signature", out, base_path, graph_path;
  int n = 0, m = 0, s = 1, iters = 10000, restarts = 1;
  double step = 0.01, target = 0.0;
  std::uint64_t seed = 0;
  auto* gen_dict = app.add_subcommand("gen-dict", "Construct a local dictionary");
  gen_dict->add_option("--kind", kind, "heaviside | signature | multi | graph")
      ->check(CLI::IsMember({"heaviside", "signature", "multi", "graph"}));
  gen_dict->add_option("--n", n, "Patch length")->required();
  gen_dict->add_option("--m", m, "Atom count (base length)");
  gen_dict->add_option("--s", s, "Base signals for multi");
  gen_dict->add_option("--seed", seed);
  gen_dict->add_option("--iters", iters, "Coherence optimizer iterations (0 = random base)");
  gen_dict->add_option("--step", step, "Coherence optimizer step");
  gen_dict->add_option("--restarts", restarts);
  gen_dict->add_option("--target", target, "Stop once the coherence reaches this value");
  gen_dict->add_option("--base", base_path, "CSV base signal for signature");
  gen_dict->add_option("--graph", graph_path, "Graph JSON with transfer matrices (kind graph)");
  gen_dict->add_option("--out", out);

  // gen-signal
  std::string dict_path, path_path;
  int N = 0;
  auto* gen_signal = app.add_subcommand("gen-signal", "Sample a model signal on a support sequence");
  gen_signal->add_option("--dict", dict_path)->required();
  gen_signal->add_option("--path", path_path, "Support sequence JSON")->required();
  gen_signal->add_option("--N", N)->required();
  gen_signal->add_option("--seed", seed);
  gen_signal->add_option("--out", out);

  // graph
  double edge_tol = kRankTol;
  bool min_rule = false;
  int P = 0;
  std::size_t cap = 100000;
  bool open_paths = false;
  auto* graph = app.add_subcommand("graph", "Dependency graph tools");
  graph->require_subcommand(1);
  auto* gbuild = graph->add_subcommand("build", "Build the dependency graph of a dictionary");
  gbuild->add_option("--dict", dict_path)->required();
  gbuild->add_option("--s", s)->required();
  gbuild->add_option("--edge-tol", edge_tol, "Rank tolerance for edge tests");
  gbuild->add_flag("--min-rule", min_rule, "Require rank < min(n-1, |a|+|b|) for an edge");
  gbuild->add_option("--out", out);
  auto* genum = graph->add_subcommand("enumerate", "Enumerate walks of length P");
  genum->add_option("--graph", graph_path)->required();
  genum->add_option("--P", P)->required();
  genum->add_option("--cap", cap);
  genum->add_flag("--open-paths", open_paths, "Do not require the wrap-around edge");
  genum->add_option("--dict", dict_path, "Report realizability against this dictionary");
  genum->add_option("--out", out);
  auto* grealize = graph->add_subcommand("realize", "Find a dictionary with the given transfer graph");
  grealize->add_option("--graph", graph_path)->required();
  grealize->add_option("--n", n)->required();
  grealize->add_option("--seed", seed);
  grealize->add_option("--out", out);

  // pursue
  std::string algo = "lpa", in_path, support_path;
  double beta = 1.0, rho = 1.0, rho_growth = 1.0;
  int admm_iters = 300;
  bool project = false;
  auto* pursue = app.add_subcommand("pursue", "Run a pursuit on a signal");
  pursue->add_option("--algo", algo)->check(CLI::IsMember({"lpa", "qomp", "admm", "oracle"}));
  pursue->add_option("--dict", dict_path)->required();
  pursue->add_option("--in", in_path, "Signal CSV")->required();
  pursue->add_option("--s", s)->required();
  pursue->add_option("--beta", beta);
  pursue->add_option("--rho", rho);
  pursue->add_option("--iters", admm_iters, "ADMM outer iterations");
  pursue->add_option("--rho-growth", rho_growth, "ADMM penalty growth per sweep (1 = fixed)");
  pursue->add_flag("--project", project, "Return the projected variant");
  pursue->add_option("--support", support_path, "Oracle support sequence JSON");
  pursue->add_option("--out", out);

  // measure
  std::string what = "spark", variant = "classical";
  int k = 1;
  double mcap = 1e6;
  auto* measure = app.add_subcommand("measure", "Model measures of a dictionary");
  measure->add_option("--dict", dict_path)->required();
  measure->add_option("--what", what)->check(CLI::IsMember({"spark", "gspark", "mu1", "mu1star", "eta1star", "rip"}));
  measure->add_option("--s", s);
  measure->add_option("--k", k);
  measure->add_option("--N", N, "Signal length for allowed supports and generalized RIP");
  measure->add_option("--variant", variant)->check(CLI::IsMember({"classical", "globalized", "generalized"}));
  measure->add_option("--cap", mcap);
  measure->add_option("--out", out);

  // experiment
  std::string config_path;
  auto* experiment = app.add_subcommand("experiment", "Run an experiment configuration");
  experiment->require_subcommand(1);
  auto* erec = experiment->add_subcommand("recovery", "Noiseless support recovery rates");
  auto* eden = experiment->add_subcommand("denoise", "Denoising MSE per noise level");
  for (auto* sub : {erec, eden}) {
    sub->add_option("--config", config_path)->required();
    sub->add_option("--out", out);
  }

  // theory
  int alpha = 1;
  std::string segments;
  double sigma = 1.0;
  auto* theory = app.add_subcommand("theory", "Piecewise-constant patch averaging theory");
  theory->require_subcommand(1);
  auto* tR = theory->add_subcommand("R", "R(n, alpha)");
  tR->add_option("--n", n)->required();
  tR->add_option("--alpha", alpha)->required();
  auto* tmse = theory->add_subcommand("lpa-mse", "sigma^2 sum_r R(n, l_r)");
  tmse->add_option("--n", n)->required();
  tmse->add_option("--segments", segments, "Comma separated segment lengths")->required();
  tmse->add_option("--sigma", sigma);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen_dict) {
      Dictionary d;
      if (kind == "heaviside") {
        d = heaviside(n);
      } else if (kind == "signature") {
        if (!base_path.empty()) {
          d = signature(read_csv_vector(base_path), n);
        } else {
          if (m < 1) throw ConfigError("--m is required for signature dictionaries");
          if (iters > 0) {
            CoherenceOptimizerOptions opt;
            opt.iterations = iters;
            opt.step = step;
            opt.restarts = restarts;
            opt.target = target;
            opt.seed = seed;
            const auto r = optimize_signature_coherence(n, m, opt);
            std::cerr << "coherence " << r.coherence << "\n";
            d = r.dict;
          } else {
            Rng rng(seed);
            Vector b(m);
            for (int i = 0; i < m; ++i) b(i) = rng.normal();
            d = signature(b, n);
          }
        }
      } else if (kind == "multi") {
        if (m < 1) throw ConfigError("--m is required for multi-signature dictionaries");
        d = multi_signature(random_multi_signature_spec(n, m, s, seed));
      } else {
        if (graph_path.empty()) throw ConfigError("--graph is required for kind graph");
        RealizeOptions opt;
        opt.seed = seed;
        d = realize_graph(graph_from_json(read_json_file(graph_path)), n, opt);
      }
      emit_json(out, dictionary_to_json(d));
    } else if (*gen_signal) {
      const Dictionary d = dictionary_from_json(read_json_file(dict_path));
      const SupportSequence S = support_from_json(read_json_file(path_path), d.m());
      Rng rng(seed);
      const SampledSignal sig = sample_signal(S, d, N, rng);
      if (out.empty() || out == "-") {
        for (Eigen::Index i = 0; i < sig.x.size(); ++i) std::cout << sig.x(i) << "\n";
      } else {
        write_csv_vector(out, sig.x);
      }
    } else if (*gbuild) {
      const Dictionary d = dictionary_from_json(read_json_file(dict_path));
      GraphBuildOptions opt;
      opt.tol = edge_tol;
      opt.min_rule = min_rule;
      emit_json(out, graph_to_json(build_graph(d, s, opt)));
    } else if (*genum) {
      const DependencyGraph g = graph_from_json(read_json_file(graph_path));
      const PathEnumeration e = enumerate_paths(g, P, cap, !open_paths);
      json paths = json::array();
      std::optional<Dictionary> d;
      if (!dict_path.empty()) d = dictionary_from_json(read_json_file(dict_path));
      for (const auto& S : e.paths) {
        json entry{{"support", support_to_json(S)}};
        if (d) {
          const Realizability r = is_realizable(S, *d, P);
          entry["realizable"] = r.realizable;
          entry["dim"] = r.dim;
        }
        paths.push_back(entry);
      }
      emit_json(out, json{{"count", e.paths.size()}, {"truncated", e.truncated}, {"paths", paths}});
    } else if (*grealize) {
      RealizeOptions opt;
      opt.seed = seed;
      emit_json(out, dictionary_to_json(realize_graph(graph_from_json(read_json_file(graph_path)), n, opt)));
    } else if (*pursue) {
      const Dictionary d = dictionary_from_json(read_json_file(dict_path));
      const Signal y = read_csv_vector(in_path);
      const PatchModel model(d, s, static_cast<int>(y.size()));
      PursuitResult r;
      switch (algorithm_from_string(algo)) {
        case Algorithm::lpa: r = lpa(model, y); break;
        case Algorithm::qomp: {
          QompOptions opt;
          opt.project = false;
          r = qomp(model, y, beta, opt);
          break;
        }
        case Algorithm::admm: {
          AdmmOptions opt;
          opt.rho = rho;
          opt.outer_iters = admm_iters;
          opt.rho_growth = rho_growth;
          r = admm_pursuit(model, y, opt);
          break;
        }
        case Algorithm::oracle: {
          if (support_path.empty()) throw ConfigError("--support is required for the oracle");
          r.support = support_from_json(read_json_file(support_path), d.m());
          r.gamma = GlobalRep(d.m(), model.N());
          r = project_result(r, y, d);
          break;
        }
      }
      if (project && !r.projected) r = project_result(r, y, d);
      emit_json(out, result_to_json(r));
    } else if (*measure) {
      const Dictionary d = dictionary_from_json(read_json_file(dict_path));
      const int NN = N > 0 ? N : 2 * d.n();
      auto T = [&] { return allowed_supports(PatchModel(d, s, NN)); };
      MeasureResult r;
      if (what == "spark") r = spark(d, mcap);
      else if (what == "gspark") r = globalized_spark(d, T(), mcap);
      else if (what == "mu1") r = babel_mu1(d, s);
      else if (what == "mu1star") r = globalized_mu1star(d, T(), k);
      else if (what == "eta1star") r = eta1star(d, T(), s);
      else {
        const RipVariant v = rip_variant_from_string(variant);
        if (v == RipVariant::globalized) {
          const AllowedSupports t = T();
          r = rip_constants(d, k, v, &t, NN, mcap);
        } else {
          r = rip_constants(d, k, v, nullptr, NN, mcap);
        }
      }
      emit_json(out, measure_to_json(r));
    } else if (*erec || *eden) {
      const ExperimentConfig cfg = ExperimentConfig::from_json(read_json_file(config_path));
      const std::string csv = *erec ? run_recovery(cfg) : run_denoising(cfg);
      if (!cfg.outputs.empty()) {
        std::filesystem::create_directories(cfg.outputs);
        write_text_file((std::filesystem::path(cfg.outputs) / (*erec ? "recovery.csv" : "denoising.csv")).string(), csv);
      }
      emit(out, csv);
    } else if (*tR) {
      std::cout.precision(15);
      std::cout << R_theory(n, alpha) << "\n";
    } else if (*tmse) {
      std::cout.precision(15);
      std::cout << lpa_pwc_mse_theory(n, parse_int_list(segments), sigma) << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << " (gap " << e.gap() << ")\n";
    return 3;
  } catch (const NonMinimalSupport& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const UnrealizableSupport& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const CombinatorialExplosion& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const DomainError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
