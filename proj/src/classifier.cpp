#include "congruent/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "congruent/error.hpp"

namespace congruent {

namespace {

constexpr double kGridMatchTolerance = 1e-9;
constexpr std::size_t kMaxVerificationDenominator = 7;

template <class Fn>
void parallel_for(std::size_t count, unsigned max_threads, Fn&& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, max_threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double expansion_value(const std::vector<Partition>& partitions, const std::vector<double>& coeffs,
                       const RMeasure& base, std::span<const RMeasure> tangents) {
  double sum = 0.0;
  for (std::size_t p = 0; p < partitions.size(); ++p) {
    if (coeffs[p] != 0.0) sum += coeffs[p] * tau_P_eval(partitions[p], base, tangents);
  }
  return sum;
}

std::vector<double> column(const std::vector<std::vector<double>>& table, std::size_t l) {
  std::vector<double> out(table.size());
  for (std::size_t p = 0; p < table.size(); ++p) out[p] = table[p][l];
  return out;
}

// A probability vector k_i / D with k_i >= 1 and D <= 7.
std::vector<double> rational_probability(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> size_dist(1, kMaxVerificationDenominator);
  const std::size_t m = size_dist(rng);
  std::uniform_int_distribution<std::size_t> denom_dist(m, kMaxVerificationDenominator);
  const std::size_t denom = denom_dist(rng);
  std::vector<std::size_t> counts(m, 1);
  std::uniform_int_distribution<std::size_t> slot(0, m - 1);
  for (std::size_t extra = denom - m; extra > 0; --extra) ++counts[slot(rng)];
  std::vector<double> q(m);
  for (std::size_t i = 0; i < m; ++i) q[i] = static_cast<double>(counts[i]) / static_cast<double>(denom);
  return q;
}

std::vector<RMeasure> random_tangents(std::mt19937_64& rng, int n, std::size_t size, Rational r) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<RMeasure> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    std::vector<double> c(size);
    for (double& x : c) x = unit(rng);
    out.emplace_back(std::move(c), r);
  }
  return out;
}

RMeasure root_of(const std::vector<double>& mu, const Rational& r) { return power_map(RMeasure(mu), r); }

// Tangent to S^r at mu^r corresponding to the exponent-one tangent w:
// d pi^r (w) = r mu^{r-1} w.
RMeasure lift_tangent(const std::vector<double>& mu, std::span<const double> w, const Rational& r) {
  if (r == Rational(1)) return RMeasure(std::vector<double>(w.begin(), w.end()));
  const double rd = to_double(r);
  std::vector<double> out(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) out[i] = rd * std::pow(mu[i], rd - 1.0) * w[i];
  return RMeasure(std::move(out), r);
}

struct VerificationPoint {
  std::size_t grid_index;
  RMeasure base;
  std::vector<RMeasure> tangents;
};

// Points lambda * q with q rational; tangents either arbitrary or, on the
// simplex, of total mass zero before lifting to exponent r.
std::vector<VerificationPoint> verification_points(const DecomposeOptions& options, int n, Rational r,
                                                   bool simplex) {
  std::mt19937_64 rng(options.seed);
  std::vector<VerificationPoint> out;
  out.reserve(options.verification_points);
  for (std::size_t t = 0; t < options.verification_points; ++t) {
    const std::size_t l = simplex ? 0 : t % options.lambda_grid.size();
    const double lambda = simplex ? 1.0 : options.lambda_grid[l];
    auto mu = rational_probability(rng);
    for (double& x : mu) x *= lambda;
    auto raw = random_tangents(rng, n, mu.size(), Rational(1));
    std::vector<RMeasure> tangents;
    tangents.reserve(n);
    for (auto& w : raw) {
      std::vector<double> c(w.coeffs().begin(), w.coeffs().end());
      if (simplex) {
        const double mass = w.total_mass();
        for (std::size_t i = 0; i < c.size(); ++i) c[i] -= mu[i] * mass;
      }
      tangents.push_back(lift_tangent(mu, c, r));
    }
    out.push_back({l, root_of(mu, r), std::move(tangents)});
  }
  return out;
}

double max_residual(const std::vector<VerificationPoint>& points, unsigned max_threads,
                    const std::function<double(const VerificationPoint&)>& diff) {
  std::vector<double> residuals(points.size(), 0.0);
  parallel_for(points.size(), max_threads, [&](std::size_t t) { residuals[t] = diff(points[t]); });
  double worst = 0.0;
  for (double d : residuals) worst = std::max(worst, std::isnan(d) ? INFINITY : d);
  return worst;
}

void validate_options(const DecomposeOptions& options) {
  if (options.lambda_grid.empty()) throw Error(Errc::kInvalidArgument, "lambda grid is empty");
  for (double l : options.lambda_grid) {
    if (!(l > 0.0) || !std::isfinite(l)) throw Error(Errc::kInvalidArgument, "lambda grid values must be positive");
  }
  if (!(options.tolerance > 0.0)) throw Error(Errc::kInvalidArgument, "tolerance must be positive");
}

}  // namespace

TensorFieldOracle synthesize(int degree, Rational regularity, const std::vector<ExpansionTerm>& terms) {
  if (terms.empty()) {
    return TensorFieldOracle(degree, regularity, [](const RMeasure&, std::span<const RMeasure>) { return 0.0; });
  }
  std::vector<std::function<double(double)>> weights;
  std::vector<TensorFieldOracle> oracles;
  for (const auto& t : terms) {
    if (t.partition.degree() != degree) throw Error(Errc::kDegreeMismatch, "expansion term of wrong degree");
    weights.push_back(t.coefficient);
    oracles.push_back(partition_tensor(t.partition, regularity));
  }
  return linear_combination(std::move(weights), std::move(oracles));
}

std::optional<std::size_t> Decomposition::index_of(const Partition& p) const {
  const auto it = std::find(partitions.begin(), partitions.end(), p);
  if (it == partitions.end()) return std::nullopt;
  return static_cast<std::size_t>(it - partitions.begin());
}

double Decomposition::coefficient(const Partition& p, std::size_t l) const {
  const auto idx = index_of(p);
  return idx ? coefficients[*idx].at(l) : 0.0;
}

TensorFieldOracle Decomposition::reconstruction() const {
  auto parts = partitions;
  auto table = coefficients;
  auto grid = lambda_grid;
  if (space == Space::kProbabilities) {
    const auto constants = column(table, 0);
    return TensorFieldOracle(degree, regularity,
                             [parts, constants](const RMeasure& base, std::span<const RMeasure> tangents) {
                               return expansion_value(parts, constants, base, tangents);
                             });
  }
  return TensorFieldOracle(degree, regularity,
                           [parts, table, grid](const RMeasure& base, std::span<const RMeasure> tangents) {
                             const double mass = norm(base);
                             for (std::size_t l = 0; l < grid.size(); ++l) {
                               if (std::abs(mass - grid[l]) <= kGridMatchTolerance * grid[l]) {
                                 return expansion_value(parts, column(table, l), base, tangents);
                               }
                             }
                             throw Error(Errc::kOutsideLambdaGrid,
                                         "total mass " + std::to_string(mass) + " is not on the lambda grid");
                           });
}

CenterProbe probe_center(const TensorFieldOracle& oracle, std::size_t index_size, double lambda,
                         const Partition& p) {
  const int n = oracle.degree();
  if (p.degree() != n) throw Error(Errc::kDegreeMismatch, "partition degree differs from the oracle's");
  const auto blocks = static_cast<std::size_t>(p.size());
  if (index_size < blocks) {
    throw Error(Errc::kIndexSetTooSmall, "index set of size " + std::to_string(index_size) +
                                             " cannot realize a partition with " + std::to_string(blocks) +
                                             " blocks");
  }
  if (!(lambda > 0.0)) throw Error(Errc::kInvalidArgument, "center scale must be positive");
  const Rational r = oracle.regularity();
  const auto mu = center(index_size, lambda);
  const std::vector<double> mu_coeffs(mu.coeffs().begin(), mu.coeffs().end());
  const RMeasure base = root_of(mu_coeffs, r);

  std::vector<RMeasure> basis;
  basis.reserve(index_size);
  for (std::size_t i = 0; i < index_size; ++i) {
    const auto d = dirac(index_size, i);
    basis.push_back(lift_tangent(mu_coeffs, d.coeffs(), r));
  }
  auto evaluate = [&](const std::vector<std::size_t>& multiindex) {
    std::vector<RMeasure> tangents;
    tangents.reserve(multiindex.size());
    for (std::size_t i : multiindex) tangents.push_back(basis[i]);
    return oracle(base, tangents);
  };

  const auto first = representative_multiindex(p);
  CenterProbe probe{evaluate(first), 0.0};
  std::optional<std::vector<std::size_t>> second;
  if (index_size > blocks) {
    second = first;
    for (auto& i : *second) ++i;
  } else if (blocks >= 2) {
    second = first;
    for (auto& i : *second) i = blocks - 1 - i;
  }
  if (second) probe.spread = std::abs(evaluate(*second) - probe.value);
  return probe;
}

double center_component(const TensorFieldOracle& oracle, std::size_t index_size, double lambda, const Partition& p) {
  return probe_center(oracle, index_size, lambda, p).value;
}

Decomposition decompose_on_M(const TensorFieldOracle& oracle, const DecomposeOptions& options) {
  validate_options(options);
  const int n = oracle.degree();
  if (n < 1) throw Error(Errc::kInvalidArgument, "decomposition needs degree at least 1");
  const std::size_t s = options.probe_size == 0 ? static_cast<std::size_t>(n) + 2 : options.probe_size;
  if (s < static_cast<std::size_t>(n)) {
    throw Error(Errc::kIndexSetTooSmall, "probe size " + std::to_string(s) + " is below the degree " +
                                             std::to_string(n));
  }

  Decomposition out;
  out.degree = n;
  out.regularity = oracle.regularity();
  out.space = Space::kMeasures;
  out.lambda_grid = options.lambda_grid;
  out.partitions = enumerate_partitions(n);
  out.coefficients.assign(out.partitions.size(), std::vector<double>(options.lambda_grid.size(), 0.0));
  out.probe_size = s;
  out.tolerance = options.tolerance;

  const auto& parts = out.partitions;
  std::vector<double> spreads(options.lambda_grid.size(), 0.0);
  parallel_for(options.lambda_grid.size(), options.max_threads, [&](std::size_t l) {
    const double lambda = options.lambda_grid[l];
    const double scale = static_cast<double>(s) / lambda;
    for (std::size_t q = 0; q < parts.size(); ++q) {
      const auto probe = probe_center(oracle, s, lambda, parts[q]);
      spreads[l] = std::max(spreads[l], probe.spread);
      double residual = probe.value;
      for (std::size_t p = 0; p < q; ++p) {
        const double a = out.coefficients[p][l];
        if (a != 0.0 && refines(parts[p], parts[q])) {
          residual -= a * std::pow(scale, n - parts[p].size());
        }
      }
      out.coefficients[q][l] = residual / std::pow(scale, n - parts[q].size());
    }
  });
  out.representative_spread = *std::max_element(spreads.begin(), spreads.end());

  const auto points = verification_points(options, n, oracle.regularity(), false);
  out.verification_points = points.size();
  out.residual = max_residual(points, options.max_threads, [&](const VerificationPoint& pt) {
    const double expected = oracle(pt.base, pt.tangents);
    return std::abs(expected - expansion_value(parts, column(out.coefficients, pt.grid_index), pt.base, pt.tangents));
  });

  const double spread_bound = options.tolerance;
  out.non_congruent = out.residual > options.tolerance || out.representative_spread > spread_bound;
  return out;
}

Decomposition decompose_on_P(const TensorFieldOracle& oracle, const DecomposeOptions& options) {
  validate_options(options);
  const int n = oracle.degree();
  const Rational r = oracle.regularity();

  // pi_I^* Theta, pulled back to exponent one: mu -> p = mu/||mu|| and
  // w -> (w - p sum(w)) / ||mu||.
  TensorFieldOracle extended(n, Rational(1), [oracle, r](const RMeasure& base, std::span<const RMeasure> tangents) {
    const double mass = base.total_mass();
    std::vector<double> p(base.coeffs().begin(), base.coeffs().end());
    for (double& x : p) x /= mass;
    std::vector<RMeasure> lifted;
    lifted.reserve(tangents.size());
    for (const auto& v : tangents) {
      const double vmass = v.total_mass();
      std::vector<double> w(v.size());
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = (v[i] - p[i] * vmass) / mass;
      lifted.push_back(lift_tangent(p, w, r));
    }
    return oracle(root_of(p, r), lifted);
  });

  DecomposeOptions on_m = options;
  on_m.lambda_grid = {1.0};
  const auto full = decompose_on_M(extended, on_m);

  Decomposition out;
  out.degree = n;
  out.regularity = r;
  out.space = Space::kProbabilities;
  out.lambda_grid = {1.0};
  out.probe_size = full.probe_size;
  out.tolerance = options.tolerance;
  out.representative_spread = full.representative_spread;
  for (std::size_t p = 0; p < full.partitions.size(); ++p) {
    if (full.partitions[p].has_singleton()) {
      out.absorbed.push_back(full.partitions[p]);
      out.absorbed_coefficients.push_back(full.coefficients[p][0]);
    } else {
      out.partitions.push_back(full.partitions[p]);
      out.coefficients.push_back({full.coefficients[p][0]});
    }
  }

  const auto points = verification_points(options, n, r, true);
  out.verification_points = full.verification_points + points.size();
  const auto constants = column(out.coefficients, 0);
  const double simplex_residual = max_residual(points, options.max_threads, [&](const VerificationPoint& pt) {
    return std::abs(oracle(pt.base, pt.tangents) - expansion_value(out.partitions, constants, pt.base, pt.tangents));
  });
  out.residual = std::max(full.residual, simplex_residual);
  out.non_congruent = full.non_congruent || out.residual > options.tolerance;
  return out;
}

std::vector<SignedMeasure> probe_vectors_V(std::size_t base_size) {
  if (base_size == 0) throw Error(Errc::kInvalidArgument, "base index set must be nonempty");
  std::vector<SignedMeasure> out;
  out.reserve(base_size);
  for (std::size_t i = 0; i < base_size; ++i) {
    std::vector<double> c(3 * base_size, 0.0);
    c[i] = 2.0;
    c[base_size + i] = -1.0;
    c[2 * base_size + i] = -1.0;
    out.emplace_back(std::move(c));
  }
  return out;
}

std::vector<std::vector<double>> singleton_free_probe_matrix(int n) {
  const auto parts = enumerate_singleton_free_partitions(n);
  const auto base_size = static_cast<std::size_t>(std::max(n, 1));
  const auto vs = probe_vectors_V(base_size);
  const auto c_j = center(3 * base_size, 1.0);
  std::vector<std::vector<double>> m(parts.size(), std::vector<double>(parts.size(), 0.0));
  for (std::size_t q = 0; q < parts.size(); ++q) {
    std::vector<RMeasure> tangents;
    for (std::size_t i : representative_multiindex(parts[q])) tangents.push_back(vs[i]);
    for (std::size_t p = 0; p < parts.size(); ++p) m[p][q] = tau_P_eval(parts[p], c_j, tangents);
  }
  return m;
}

}  // namespace congruent
