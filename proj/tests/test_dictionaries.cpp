#include "patchsparse/dictionaries.hpp"
#include "patchsparse/errors.hpp"
#include "patchsparse/graphmodel.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace patchsparse;
using testutil::gaussian;

TEST_CASE("heaviside columns, norms and inverse") {
  Dictionary h = heaviside(4);
  Matrix expect(4, 4);
  expect << 1, 1, 1, 1, 0, 1, 1, 1, 0, 0, 1, 1, 0, 0, 0, 1;
  CHECK(h.atoms() == expect);
  CHECK(h.kind() == DictionaryKind::heaviside);
  CHECK_FALSE(h.normalized());
  const Vector norms = h.atoms().colwise().norm();
  CHECK(norms(0) == doctest::Approx(1.0));
  CHECK(norms(1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(norms(2) == doctest::Approx(std::sqrt(3.0)));
  CHECK(norms(3) == doctest::Approx(2.0));
  const Vector e = h.atoms().lu().solve(Vector::Ones(4));
  CHECK((e - Vector::Unit(4, 3)).norm() <= 1e-14);
  for (int n = 2; n <= 64; n += 7) CHECK(std::abs(heaviside(n).atoms().determinant()) == doctest::Approx(1.0));
  CHECK_THROWS(heaviside(1));
}

TEST_CASE("heaviside: a patch with L-1 steps has at most L nonzeros") {
  Rng rng(31);
  const int n = 12;
  Dictionary h = heaviside(n);
  for (int L = 1; L <= 5; ++L) {
    // L constant pieces with random breakpoints
    std::vector<int> cuts;
    while (static_cast<int>(cuts.size()) < L - 1) {
      const int c = 1 + static_cast<int>(rng.below(n - 1));
      if (std::find(cuts.begin(), cuts.end(), c) == cuts.end()) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    Vector p(n);
    double level = rng.normal();
    for (int t = 0, r = 0; t < n; ++t) {
      if (r < static_cast<int>(cuts.size()) && t == cuts[r]) {
        level += 1.0 + rng.uniform();
        ++r;
      }
      p(t) = level;
    }
    const Vector a = h.atoms().lu().solve(p);
    int nz = 0;
    for (int j = 0; j < n; ++j) nz += std::abs(a(j)) > 1e-10;
    CHECK(nz <= L);
  }
}

TEST_CASE("signature dictionary") {
  // e_0 in R^4 has a zero window at shift 1
  CHECK_THROWS_AS(signature(Vector::Unit(4, 0), 2), ConstructionError);
  Vector alt(4);
  alt << 1, 0, 1, 0;
  Dictionary d = signature(alt, 2);
  CHECK(d.m() == 4);
  CHECK(d.normalized());
  CHECK(d.atom(0) == (Vector(2) << 1, 0).finished());
  CHECK(d.atom(1) == (Vector(2) << 0, 1).finished());

  Rng rng(32);
  Vector base = gaussian(10, rng);
  Dictionary s = signature(base, 6);
  CHECK(s.kind() == DictionaryKind::signature);
  for (int j = 0; j < 10; ++j) CHECK(std::abs(s.atom(j).norm() - 1.0) <= 1e-12);
  const Matrix w = signature_windows(base, 6);
  for (int i = 0; i < 10; ++i) {
    CHECK((w.col(i).tail(5) - w.col((i + 1) % 10).head(5)).norm() <= 1e-15);
    // normalized atoms stay parallel on the overlap
    const Vector a = s.atom(i).tail(5), b = s.atom((i + 1) % 10).head(5);
    CHECK(std::abs(std::abs(a.dot(b)) - a.norm() * b.norm()) <= 1e-12);
  }
  Vector z = Vector::Zero(5);
  z(0) = 1.0;
  CHECK_THROWS_AS(signature(z, 2), ConstructionError);  // window at shift 2 is zero
}

TEST_CASE("signature graph at s=1 is one 10-cycle") {
  Rng rng(33);
  Dictionary d = signature(gaussian(10, rng), 6);
  DependencyGraph g = build_graph(d, 1);
  CHECK(g.nodes.size() == 11);
  int nonempty = 0;
  for (auto [a, b] : g.edges) {
    if (g.nodes[a].empty() || g.nodes[b].empty()) continue;
    ++nonempty;
    CHECK((g.nodes[a][0] + 1) % 10 == g.nodes[b][0]);
  }
  CHECK(nonempty == 10);
}

TEST_CASE("multi-signature") {
  SUBCASE("s = 1 without transfers reduces to the signature dictionary") {
    Rng rng(34);
    Vector base = gaussian(9, rng);
    SignatureSpec spec;
    spec.base = base;
    spec.n = 5;
    Dictionary a = multi_signature(spec), b = signature(base, 5);
    CHECK((a.atoms() - b.atoms()).norm() <= 1e-14);
    CHECK(a.kind() == DictionaryKind::multi_signature);
  }
  SUBCASE("n=10, m=12, s=2: transfer cycle over the 6 block pairs") {
    SignatureSpec spec = random_multi_signature_spec(10, 12, 2, 5);
    Dictionary d = multi_signature(spec);
    CHECK(d.m() == 12);
    CHECK(d.scales().size() == 12);
    DependencyGraph g = build_graph(d, 2);
    DependencyGraph t = transfer_subgraph(d, g, 2);
    int nonempty = 0;
    for (auto [a, b] : t.edges) {
      if (t.nodes[a].empty()) continue;
      ++nonempty;
      const int blk = t.nodes[a][0] / 2;
      CHECK(t.nodes[a] == std::vector<int>{2 * blk, 2 * blk + 1});
      CHECK(t.nodes[b] == std::vector<int>{2 * ((blk + 1) % 6), 2 * ((blk + 1) % 6) + 1});
    }
    CHECK(nonempty == 6);
  }
  SUBCASE("k shifts give minimal local sparsity k*s") {
    const int n = 10, r = 6, s = 2, N = 36;
    SignatureSpec spec = random_multi_signature_spec(n, r * s, s, 6);
    Dictionary d = multi_signature(spec);
    Rng rng(35);
    for (int k = 1; k <= 2; ++k) {
      std::vector<std::vector<int>> sets;
      for (int i = 0; i < N; ++i) {
        std::vector<int> si;
        for (int sh : {0, 3}) {
          if (sh == 3 && k == 1) continue;
          const int blk = (i + sh) % r;
          si.push_back(blk * s);
          si.push_back(blk * s + 1);
        }
        std::sort(si.begin(), si.end());
        sets.push_back(si);
      }
      SupportSequence S(sets, r * s);
      Realizability rz = is_realizable(S, d, N);
      CHECK(rz.dim == k * s);
      SampledSignal sig = sample_signal(S, d, N, rng);
      for (int i = 0; i < N; i += 5) {
        const Vector p = extract_patch(sig.x, i, n);
        const Matrix Ds = d.columns(S[i]);
        CHECK((Ds * Ds.colPivHouseholderQr().solve(p) - p).norm() <= 1e-10);
        for (std::size_t drop = 0; drop < S[i].size(); ++drop) {
          std::vector<int> sub = S[i];
          sub.erase(sub.begin() + static_cast<long>(drop));
          const Matrix Dsub = d.columns(sub);
          CHECK((Dsub * Dsub.colPivHouseholderQr().solve(p) - p).norm() > 1e-6);
        }
      }
    }
  }
  SUBCASE("singular transfer is rejected") {
    SignatureSpec spec = random_multi_signature_spec(6, 8, 2, 7);
    spec.transfer[1] = Matrix::Ones(2, 2);
    CHECK_THROWS_AS(multi_signature(spec), ConstructionError);
  }
}

TEST_CASE("coherence optimizer") {
  SUBCASE("n=15, m=20 reaches the relaxed target") {
    CoherenceOptimizerOptions opt;
    opt.iterations = 10000;
    opt.seed = 3;
    CoherenceOptimizerResult r = optimize_signature_coherence(15, 20, opt);
    CHECK(r.coherence <= 0.35);
    CHECK(mutual_coherence(r.dict.atoms()) == doctest::Approx(r.coherence).epsilon(1e-12));
    CHECK(r.dict.kind() == DictionaryKind::signature);
    // deterministic given the seed
    CHECK(optimize_signature_coherence(15, 20, opt).coherence == r.coherence);
  }
  SUBCASE("random signature dictionaries sit near 0.5") {
    double mean = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
      Rng rng(100 + seed);
      mean += mutual_coherence(signature(gaussian(20, rng), 15).atoms()) / 10.0;
    }
    CHECK(mean >= 0.35);
    CHECK(mean <= 0.65);
  }
  SUBCASE("best-so-far history is non-increasing") {
    CoherenceOptimizerOptions opt;
    opt.iterations = 500;
    opt.seed = 9;
    CoherenceOptimizerResult r = optimize_signature_coherence(6, 7, opt);
    REQUIRE(!r.best_history.empty());
    for (std::size_t i = 1; i < r.best_history.size(); ++i) CHECK(r.best_history[i] <= r.best_history[i - 1]);
  }
  CHECK_THROWS(optimize_signature_coherence(5, 5, {}));
}

TEST_CASE("mutual coherence of two atoms") {
  const double th = 0.7;
  Matrix a(2, 2);
  a << 1, std::cos(th), 0, std::sin(th);
  CHECK(mutual_coherence(a) == doctest::Approx(std::cos(th)));
}

TEST_CASE("CSC pseudo-local dictionary") {
  Matrix dp(2, 1);
  dp << 2, 3;
  Dictionary th = csc_pseudo_local(Dictionary(dp, DictionaryKind::custom));
  Matrix expect(2, 3);
  expect << 3, 2, 0, 0, 3, 2;
  CHECK(th.atoms() == expect);

  Rng rng(36);
  Dictionary d(gaussian(5, 3, rng), DictionaryKind::custom);
  Dictionary t = csc_pseudo_local(d);
  CHECK(t.m() == 9 * 3);
  CHECK(t.atoms().middleCols(4 * 3, 3) == d.atoms());
  // with two or more atoms the extreme shifts are all multiples of e_0
  CHECK(mutual_coherence(t.atoms()) >= 1.0 - 1e-12);
  // a single atom alone does not force repeats
  Dictionary c = csc_pseudo_local(Dictionary(Matrix::Ones(4, 1), DictionaryKind::custom));
  CHECK(mutual_coherence(c.atoms()) < 1.0 - 1e-6);
}

TEST_CASE("normalize_atoms") {
  Matrix a(2, 1);
  a << 3, 4;
  Dictionary d = normalize_atoms(Dictionary(a, DictionaryKind::custom));
  CHECK(d.atom(0) == (Vector(2) << 0.6, 0.8).finished());
  CHECK(d.normalized());
  CHECK(d.scales()(0) == doctest::Approx(5.0));
  Dictionary h = normalize_atoms(heaviside(4));
  CHECK(h.kind() == DictionaryKind::heaviside);
  CHECK((normalize_atoms(h).atoms() - h.atoms()).norm() <= 1e-15);
  Matrix z = Matrix::Ones(3, 2);
  z.col(1).setZero();
  CHECK_THROWS_AS(normalize_atoms(Dictionary(z, DictionaryKind::custom)), ConstructionError);
}

TEST_CASE("signature signals live in the model") {
  Rng rng(37);
  Vector base = gaussian(10, rng);
  Dictionary d = signature(base, 6);
  SignatureSignal sig = signature_signal(d, base, 30, {6}, {1.0});
  Realizability rz = is_realizable(sig.support, d, 30);
  CHECK(rz.dim == 1);
  CHECK(overlap_violation(d, sig.gamma) <= 1e-10);
  CHECK((synthesize(d, sig.gamma) - sig.x).norm() <= 1e-10);
  CHECK(sig.gamma.l0inf(1e-12) == 1);
  CHECK_THROWS_AS(signature_signal(d, base, 25, {1}, {1.0}), DimensionError);
}
