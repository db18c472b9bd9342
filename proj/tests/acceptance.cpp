// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "congruent/classifier.hpp"
#include "congruent/markov.hpp"
#include "congruent/models.hpp"
#include "congruent/tensor.hpp"
#include "support/oracles.hpp"

using namespace congruent;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string line(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Partition of n with every block at most `cap`, drawn by rejection.
Partition bounded_partition(oracle::Gen& gen, int n, int cap) {
  while (true) {
    auto p = gen.partition(n);
    if (p.max_block_size() <= cap) return p;
  }
}

// 1. tau^P pulled back through random congruent kernels.
Outcome congruent_invariance() {
  const auto start = Clock::now();
  oracle::Gen gen(1001);
  KernelGenerator kg(1002);
  double worst = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  std::size_t boundary_trials = 0;
  for (int n = 1; n <= 4; ++n) {
    for (Rational r : {Rational(1), Rational(1, 2), Rational(1, 3), Rational(1, 4)}) {
      const int inv = static_cast<int>(r.denominator() / r.numerator());
      const int cap = r == Rational(1) ? n : inv;
      for (int t = 0; t < 1000; ++t) {
        const auto p = bounded_partition(gen, n, cap);
        std::vector<std::size_t> sizes(gen.size(1, 4));
        for (auto& s : sizes) s = gen.size(1, 3);
        const auto [kernel, kappa] = kg.congruent(sizes);
        const std::size_t m = sizes.size();

        // With every block at most 1/r the tensor extends to the boundary, so
        // let some coordinates vanish there (tangents stay dominated).
        auto mu = gen.positive(m, 0.05, 2.0);
        const bool boundary = p.max_block_size() <= inv && m > 1 && t % 2 == 0;
        if (boundary) {
          for (std::size_t i = 1; i < m; ++i) {
            if (gen.uniform(0, 1) < 0.4) mu[i] = 0.0;
          }
          ++boundary_trials;
        }
        const auto base = power_map(SignedMeasure(mu), r);
        std::vector<RMeasure> tangents;
        std::vector<RMeasure> magnitudes;
        for (int k = 0; k < n; ++k) {
          auto v = gen.signed_vec(m);
          for (std::size_t i = 0; i < m; ++i) {
            if (mu[i] == 0.0) v[i] = 0.0;
          }
          std::vector<double> a(v.size());
          for (std::size_t i = 0; i < m; ++i) a[i] = std::abs(v[i]);
          tangents.emplace_back(std::move(v), r);
          magnitudes.emplace_back(std::move(a), r);
        }
        const auto tau = partition_tensor(p, r);
        const double direct = tau(base, tangents);
        const double pulled = pullback_markov(kernel, tau)(base, tangents);
        const double scale = std::max({std::abs(direct), tau(base, magnitudes), 1e-300});
        const double rel = std::abs(pulled - direct) / scale;
        worst = std::max(worst, rel);
        if (!(rel <= 1e-9)) ++failures;
        ++trials;
      }
    }
  }
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = failures == 0 && elapsed < 60.0;
  o.detail = line("%zu trials (%zu with boundary bases), max rel err %.3e, %zu failures, %.2fs", trials,
                 boundary_trials, worst, failures, elapsed);
  return o;
}

// 2. Exact center evaluation.
Outcome center_evaluation() {
  using Exact = oracle::Exact;
  std::size_t checks = 0;
  std::size_t failures = 0;
  for (std::size_t size = 1; size <= 6; ++size) {
    for (Exact lambda : {Exact(1, 2), Exact(1), Exact(2)}) {
      const std::vector<Exact> coeffs(size, lambda / Exact(static_cast<std::int64_t>(size)));
      const Exact ratio = Exact(static_cast<std::int64_t>(size)) / lambda;
      for (int n = 1; n <= 4; ++n) {
        const auto parts = enumerate_partitions(n);
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        while (true) {
          const auto induced = partition_of_multiindex(idx);
          for (const auto& p : parts) {
            Exact expected(0);
            if (refines(p, induced)) {
              expected = Exact(1);
              for (int e = 0; e < n - p.size(); ++e) expected *= ratio;
            }
            if (partition_basis_component<Exact>(p, coeffs, idx) != expected) ++failures;
            ++checks;
          }
          int k = n - 1;
          while (k >= 0 && ++idx[k] == size) idx[k--] = 0;
          if (k < 0) break;
        }
      }
    }
  }
  Outcome o;
  o.pass = failures == 0;
  o.detail = line("%zu exact comparisons over |I| <= 6, n <= 4, lambda in {1/2,1,2}; %zu mismatches", checks, failures);
  return o;
}

// 3. Chentsov recovery on probability measures.
Outcome chentsov_recovery() {
  Outcome o;
  std::string detail;
  for (int n : {2, 3}) {
    for (Rational r : {Rational(1), Rational(1, 2)}) {
      const auto d = decompose_on_P(partition_tensor(Partition::whole(n), r));
      std::size_t nonzero = 0;
      for (const auto& row : d.coefficients) nonzero += std::abs(row[0]) > 1e-10;
      const double c = d.coefficient(Partition::whole(n));
      const bool ok = nonzero == 1 && std::abs(c - 1.0) <= 1e-10 && !d.non_congruent;
      o.pass = o.pass && ok;
      detail += line("%sn=%d r=%s: c=%.15f (%zu nonzero)", detail.empty() ? "" : "; ", n, to_string(r).c_str(), c,
                    nonzero);
    }
  }
  o.detail = detail;
  return o;
}

// 4. Campbell recovery on finite measures.
Outcome campbell_recovery() {
  Outcome o;
  double worst = 0.0;
  for (Rational r : {Rational(1, 2), Rational(1)}) {
    const auto oracle = synthesize(2, r, {{Partition::whole(2), [](double l) { return l; }},
                                          {Partition::singletons(2), [](double) { return 2.0; }}});
    DecomposeOptions opts;
    opts.lambda_grid = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    const auto d = decompose_on_M(oracle, opts);
    for (std::size_t l = 0; l < d.lambda_grid.size(); ++l) {
      const double a = d.coefficient(Partition::whole(2), l);
      const double b = d.coefficient(Partition::singletons(2), l);
      worst = std::max({worst, oracle::rel_err(a, d.lambda_grid[l]), oracle::rel_err(b, 2.0)});
    }
    o.pass = o.pass && !d.non_congruent;
  }
  o.pass = o.pass && worst <= 1e-8;
  o.detail = line("a(lambda)=lambda, b=2 on 6 grid points at r in {1/2,1}: max rel err %.3e", worst);
  return o;
}

// 5. Dimension of the singleton-free basis at n = 4.
Outcome dimension_count() {
  const auto sf = enumerate_singleton_free_partitions(4);
  const auto m = singleton_free_probe_matrix(4);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.size()));
  for (std::size_t p = 0; p < m.size(); ++p) {
    for (std::size_t q = 0; q < m.size(); ++q) a(p, q) = m[p][q];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  const double cond = s[0] / s[s.size() - 1];
  Outcome o;
  o.pass = sf.size() == 4 && svd.rank() == 4;
  o.detail = line("%zu singleton-free partitions, probe matrix rank %ld, condition number %.6g", sf.size(),
                 static_cast<long>(svd.rank()), cond);
  return o;
}

Eigen::MatrixXd random_features(oracle::Gen& gen, std::size_t m, std::size_t d) {
  Eigen::MatrixXd f(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = gen.uniform(-1, 1);
  return f;
}

Eigen::VectorXd random_vector(oracle::Gen& gen, std::size_t d, double bound = 1.0) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index a = 0; a < v.size(); ++a) v[a] = gen.uniform(-bound, bound);
  return v;
}

// Sparse kernel redrawn until every target point receives mass, so pushed
// models stay in the open cone.
MarkovKernel covering_kernel(KernelGenerator& kg, std::size_t source, std::size_t target, double sparsity) {
  while (true) {
    auto k = kg.arbitrary(source, target, sparsity);
    bool covered = true;
    for (std::size_t j = 0; j < target && covered; ++j) {
      double column = 0.0;
      for (std::size_t i = 0; i < source; ++i) column += k.row(i)[j];
      covered = column > 0.0;
    }
    if (covered) return k;
  }
}

// 6. Integral and pullback computations of tau^n.
Outcome dual_path() {
  oracle::Gen gen(6001);
  double worst = 0.0;
  for (int model = 0; model < 100; ++model) {
    const auto m = gen.size(2, 6);
    const auto d = gen.size(1, 3);
    const auto fam = zoo::exponential_family(random_features(gen, m, d));
    const auto xi = random_vector(gen, d);
    for (int n = 1; n <= 4; ++n) {
      std::vector<Eigen::VectorXd> dirs;
      for (int k = 0; k < n; ++k) dirs.push_back(random_vector(gen, d));
      const double integral = model_tensor(fam, xi, dirs);
      const double pulled = model_tensor_pullback(fam, xi, dirs);
      worst = std::max(worst, std::abs(integral - pulled) / std::max(1.0, std::abs(integral)));
    }
  }
  Outcome o;
  o.pass = worst <= 1e-6;
  o.detail = line("100 exponential families, n = 1..4: max rel diff %.3e", worst);
  return o;
}

// 7. Score and monotonicity.
Outcome score_and_monotonicity() {
  oracle::Gen gen(7001);
  KernelGenerator kg(7002);
  double worst_score = 0.0;
  for (int t = 0; t < 100; ++t) {
    const auto m = gen.size(2, 6);
    const auto d = gen.size(1, 3);
    const auto fam = zoo::exponential_family(random_features(gen, m, d));
    for (double s : model_tensor_components(fam, random_vector(gen, d), 1)) worst_score = std::max(worst_score, std::abs(s));
  }
  const auto simplex = zoo::categorical_simplex(4);
  for (int t = 0; t < 100; ++t) {
    auto p = gen.probability(4);
    Eigen::VectorXd xi(3);
    xi << p[0], p[1], p[2];
    for (double s : model_tensor_components(simplex, xi, 1)) worst_score = std::max(worst_score, std::abs(s));
  }

  double worst_excess = -INFINITY;
  std::size_t violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto m = gen.size(2, 5);
    const auto d = gen.size(1, 3);
    const auto fam = zoo::exponential_family(random_features(gen, m, d));
    const auto kernel = covering_kernel(kg, m, gen.size(1, 6), t % 2 ? 0.4 : 0.0);
    const auto pushed = pushforward_model(fam, kernel);
    const auto xi = random_vector(gen, d);
    const auto v = random_vector(gen, d);
    for (double k : {1.0, 2.0, 3.0}) {
      const double excess = log_derivative_moment(pushed, xi, v, k) - log_derivative_moment(fam, xi, v, k);
      worst_excess = std::max(worst_excess, excess);
      if (excess > 1e-10) ++violations;
    }
  }
  Outcome o;
  o.pass = worst_score <= 1e-10 && violations == 0;
  o.detail = line("max |score| %.3e over 200 statistical models; 1000 kernels x k in {1,2,3}: max excess %.3e, %zu "
                 "violations",
                 worst_score, worst_excess, violations);
  return o;
}

// 8. Synthesize, decompose, reconstruct.
Outcome round_trip() {
  oracle::Gen gen(8001);
  double worst_m = 0.0;
  double worst_p = 0.0;
  double worst_coeff = 0.0;
  bool flagged = false;
  std::size_t runs = 0;
  for (int n = 1; n <= 5; ++n) {
    for (Rational r : {Rational(1), Rational(1, 2)}) {
      for (int rep = 0; rep < 3; ++rep) {
        const auto parts = enumerate_partitions(n);
        std::vector<ExpansionTerm> terms;
        std::vector<std::pair<Partition, std::function<double(double)>>> truth;
        for (const auto& p : parts) {
          if (gen.uniform(0, 1) < 0.5) continue;
          const double c0 = gen.uniform(-1, 1);
          const double c1 = gen.uniform(-1, 1);
          std::function<double(double)> a = [c0, c1](double l) { return c0 + c1 * std::log(l); };
          terms.push_back({p, a});
          truth.emplace_back(p, a);
        }
        DecomposeOptions opts;
        opts.seed = static_cast<std::uint64_t>(100 * n + rep);
        opts.verification_points = 200;
        const auto oracle = synthesize(n, r, terms);

        const auto dm = decompose_on_M(oracle, opts);
        worst_m = std::max(worst_m, dm.residual);
        flagged = flagged || dm.non_congruent;
        for (const auto& [p, a] : truth) {
          for (std::size_t l = 0; l < dm.lambda_grid.size(); ++l) {
            worst_coeff = std::max(worst_coeff, oracle::rel_err(dm.coefficient(p, l), a(dm.lambda_grid[l])));
          }
        }

        const auto dp = decompose_on_P(oracle, opts);
        worst_p = std::max(worst_p, dp.residual);
        flagged = flagged || dp.non_congruent;
        runs += 2;
      }
    }
  }
  Outcome o;
  o.pass = worst_m <= 1e-8 && worst_p <= 1e-8 && !flagged && worst_coeff <= 1e-8;
  o.detail = line("%zu decompositions, n = 1..5, 200 points each: max residual M %.3e, P %.3e; max coefficient rel "
                 "err %.3e",
                 runs, worst_m, worst_p, worst_coeff);
  return o;
}

// 9. Bernoulli Fisher metric in closed form.
Outcome bernoulli_fisher() {
  const auto m = zoo::bernoulli();
  double worst = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const double xi = k / 10.0;
    Eigen::VectorXd at(1);
    at << xi;
    worst = std::max(worst, std::abs(fisher_metric(m, at)(0, 0) - 1.0 / (xi * (1.0 - xi))));
  }
  Outcome o;
  o.pass = worst <= 1e-8;
  o.detail = line("xi = 0.1..0.9: max abs err %.3e", worst);
  return o;
}

}  // namespace

int main() {
  const auto start = Clock::now();
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"congruent invariance", congruent_invariance},
      {"center evaluation", center_evaluation},
      {"chentsov recovery", chentsov_recovery},
      {"campbell recovery", campbell_recovery},
      {"dimension count", dimension_count},
      {"dual-path tensor identity", dual_path},
      {"score and monotonicity", score_and_monotonicity},
      {"round-trip residual", round_trip},
      {"bernoulli fisher", bernoulli_fisher},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  const double total = seconds_since(start);
  const bool fast = total < 300.0;
  std::printf("%s [runtime] whole suite: %.2fs (limit 300s)\n", fast ? "PASS" : "FAIL", total);
  failed += !fast;
  std::printf("%d of %d checks failed\n", failed, index + 1);
  return failed == 0 ? 0 : 1;
}
