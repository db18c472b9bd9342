#include "congruent/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "congruent/error.hpp"

namespace congruent {

namespace {

constexpr double kRowSumTolerance = 1e-12;

void require_exponent_one(const RMeasure& mu, const char* what) {
  if (mu.exponent() != Rational(1)) {
    throw Error(Errc::kExponentMismatch, std::string(what) + " expects a signed measure (exponent 1)");
  }
}

}  // namespace

MarkovKernel::MarkovKernel(std::size_t source_size, std::size_t target_size,
                           std::vector<double> row_major)
    : source_(source_size), target_(target_size), entries_(std::move(row_major)) {
  if (source_ == 0 || target_ == 0) throw Error(Errc::kInvalidArgument, "kernel index sets must be nonempty");
  if (entries_.size() != source_ * target_) {
    throw Error(Errc::kDimensionMismatch, "kernel matrix has " + std::to_string(entries_.size()) +
                                              " entries, expected " + std::to_string(source_ * target_));
  }
  for (std::size_t i = 0; i < source_; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < target_; ++j) {
      const double k = entries_[i * target_ + j];
      if (!(k >= 0.0) || !std::isfinite(k)) {
        throw Error(Errc::kNotStochastic, "kernel entry (" + std::to_string(i) + "," + std::to_string(j) +
                                              ") is negative or not finite");
      }
      sum += k;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw Error(Errc::kNotStochastic, "kernel row " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
    for (std::size_t j = 0; j < target_; ++j) entries_[i * target_ + j] /= sum;
  }
}

MarkovKernel MarkovKernel::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw Error(Errc::kInvalidArgument, "kernel needs at least one row");
  const std::size_t cols = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw Error(Errc::kDimensionMismatch, "kernel rows have different lengths");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return MarkovKernel(rows.size(), cols, std::move(flat));
}

MarkovKernel MarkovKernel::identity(std::size_t size) {
  std::vector<double> flat(size * size, 0.0);
  for (std::size_t i = 0; i < size; ++i) flat[i * size + i] = 1.0;
  return MarkovKernel(size, size, std::move(flat));
}

Statistic::Statistic(std::size_t target_size, std::vector<std::size_t> map)
    : target_(target_size), map_(std::move(map)) {
  if (target_ == 0 || map_.empty()) throw Error(Errc::kInvalidArgument, "statistic index sets must be nonempty");
  for (std::size_t v : map_) {
    if (v >= target_) {
      throw Error(Errc::kDimensionMismatch, "statistic value " + std::to_string(v) + " out of range");
    }
  }
}

Statistic Statistic::identity(std::size_t size) {
  std::vector<std::size_t> map(size);
  std::iota(map.begin(), map.end(), std::size_t{0});
  return Statistic(size, std::move(map));
}

std::vector<std::vector<std::size_t>> Statistic::fibers() const {
  std::vector<std::vector<std::size_t>> out(target_);
  for (std::size_t j = 0; j < map_.size(); ++j) out[map_[j]].push_back(j);
  return out;
}

MarkovKernel Statistic::as_kernel() const {
  std::vector<double> flat(map_.size() * target_, 0.0);
  for (std::size_t j = 0; j < map_.size(); ++j) flat[j * target_ + map_[j]] = 1.0;
  return MarkovKernel(map_.size(), target_, std::move(flat));
}

SignedMeasure pushforward(const MarkovKernel& kernel, const SignedMeasure& mu) {
  require_exponent_one(mu, "pushforward");
  if (mu.size() != kernel.source_size()) {
    throw Error(Errc::kDimensionMismatch, "measure on " + std::to_string(mu.size()) +
                                              " points pushed through kernel with source size " +
                                              std::to_string(kernel.source_size()));
  }
  std::vector<double> out(kernel.target_size(), 0.0);
  for (std::size_t i = 0; i < kernel.source_size(); ++i) {
    if (mu[i] == 0.0) continue;
    const auto row = kernel.row(i);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += row[j] * mu[i];
  }
  return SignedMeasure(std::move(out));
}

SignedMeasure pushforward(const Statistic& kappa, const SignedMeasure& mu) {
  require_exponent_one(mu, "pushforward");
  if (mu.size() != kappa.source_size()) throw Error(Errc::kDimensionMismatch, "statistic source size mismatch");
  std::vector<double> out(kappa.target_size(), 0.0);
  for (std::size_t j = 0; j < mu.size(); ++j) out[kappa[j]] += mu[j];
  return SignedMeasure(std::move(out));
}

MarkovKernel kernel_from_statistic(const Statistic& kappa,
                                   const std::vector<std::vector<double>>& fiber_weights) {
  const auto fibers = kappa.fibers();
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    if (fibers[i].empty()) {
      throw Error(Errc::kEmptyFiber, "fibre of point " + std::to_string(i) + " is empty");
    }
  }
  if (fiber_weights.size() != kappa.target_size()) {
    throw Error(Errc::kDimensionMismatch, "need one weight vector per point of the statistic's range");
  }
  for (std::size_t i = 0; i < fiber_weights.size(); ++i) {
    const auto& w = fiber_weights[i];
    if (w.size() != kappa.source_size()) {
      throw Error(Errc::kDimensionMismatch, "weight vector " + std::to_string(i) + " has wrong length");
    }
    for (std::size_t j = 0; j < w.size(); ++j) {
      const bool inside = kappa[j] == i;
      if (inside && !(w[j] > 0.0)) {
        throw Error(Errc::kInvalidWeights, "weight " + std::to_string(i) + "," + std::to_string(j) +
                                               " inside the fibre must be positive");
      }
      if (!inside && w[j] != 0.0) {
        throw Error(Errc::kInvalidWeights, "weight " + std::to_string(i) + "," + std::to_string(j) +
                                               " leaks outside the fibre");
      }
    }
  }
  return MarkovKernel::from_rows(fiber_weights);
}

MarkovKernel uniform_kernel_from_statistic(const Statistic& kappa) {
  const auto fibers = kappa.fibers();
  std::vector<std::vector<double>> rows(kappa.target_size(), std::vector<double>(kappa.source_size(), 0.0));
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    for (std::size_t j : fibers[i]) rows[i][j] = 1.0 / static_cast<double>(fibers[i].size());
  }
  return kernel_from_statistic(kappa, rows);
}

bool is_congruent(const MarkovKernel& kernel, const Statistic& kappa) {
  if (kernel.source_size() != kappa.target_size() || kernel.target_size() != kappa.source_size()) {
    throw Error(Errc::kDimensionMismatch, "kernel I -> P(I') needs a statistic I' -> I");
  }
  bool support_ok = true;
  for (std::size_t i = 0; i < kernel.source_size() && support_ok; ++i) {
    for (std::size_t j = 0; j < kernel.target_size(); ++j) {
      if (kappa[j] != i && kernel(i, j) != 0.0) {
        support_ok = false;
        break;
      }
    }
  }
  // Entries are nonnegative, so kappa_* K_* delta_i has no off-diagonal mass
  // exactly when the support criterion holds; the diagonal is then the
  // (renormalized) row sum.
  bool composition_ok = true;
  for (std::size_t i = 0; i < kernel.source_size() && composition_ok; ++i) {
    const auto image = pushforward(kappa, pushforward(kernel, dirac(kernel.source_size(), i)));
    for (std::size_t k = 0; k < image.size(); ++k) {
      const double expected = k == i ? 1.0 : 0.0;
      const bool off_diagonal_clean = k == i || image[k] == 0.0;
      if (!off_diagonal_clean || std::abs(image[k] - expected) > kRowSumTolerance) {
        composition_ok = false;
        break;
      }
    }
  }
  if (support_ok != composition_ok) {
    throw std::logic_error("congruence criteria disagree");
  }
  return support_ok;
}

RMeasure apply_K_r(const MarkovKernel& kernel, const RMeasure& mu_r) {
  const Rational r = mu_r.exponent();
  if (r > 1) throw Error(Errc::kExponentOutOfRange, "K_r needs an exponent in (0,1]");
  const auto mu = power_map(mu_r, 1 / r);
  return power_map(pushforward(kernel, mu), r);
}

RMeasure formal_derivative(const MarkovKernel& kernel, const SignedMeasure& mu, const RMeasure& v) {
  require_exponent_one(mu, "formal_derivative base");
  if (!mu.is_nonnegative()) throw Error(Errc::kInvalidArgument, "formal derivative needs a nonnegative base");
  if (mu.size() != kernel.source_size() || v.size() != kernel.source_size()) {
    throw Error(Errc::kDimensionMismatch, "formal derivative operands do not match the kernel source");
  }
  const Rational r = v.exponent();
  if (r > 1) throw Error(Errc::kExponentOutOfRange, "tangent exponent must lie in (0,1]");
  const double rd = to_double(r);

  // phi_i mu_i = v_i mu_i^{1-r}
  std::vector<double> weighted(mu.size(), 0.0);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] == 0.0) {
      if (v[i] != 0.0) {
        throw Error(Errc::kDominationViolation, "tangent has mass at point " + std::to_string(i) +
                                                    " where the base vanishes");
      }
      continue;
    }
    weighted[i] = v[i] * (r == Rational(1) ? 1.0 : std::pow(mu[i], 1.0 - rd));
  }
  const auto mu_prime = pushforward(kernel, mu);
  const auto moved = pushforward(kernel, SignedMeasure(std::move(weighted)));
  std::vector<double> out(kernel.target_size(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (mu_prime[j] == 0.0) continue;
    out[j] = r == Rational(1) ? moved[j] : moved[j] * std::pow(mu_prime[j], rd - 1.0);
  }
  return RMeasure(std::move(out), r);
}

std::vector<double> KernelGenerator::dirichlet(std::size_t k) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(k);
  double sum = 0.0;
  for (double& x : w) {
    do {
      x = expo(rng_);
    } while (x == 0.0);
    sum += x;
  }
  for (double& x : w) x /= sum;
  return w;
}

std::pair<MarkovKernel, Statistic> KernelGenerator::congruent(std::span<const std::size_t> fiber_sizes) {
  if (fiber_sizes.empty()) throw Error(Errc::kInvalidFiberSizes, "need at least one fibre");
  std::vector<std::size_t> labels;
  for (std::size_t i = 0; i < fiber_sizes.size(); ++i) {
    if (fiber_sizes[i] == 0) throw Error(Errc::kInvalidFiberSizes, "fibre sizes must be at least 1");
    labels.insert(labels.end(), fiber_sizes[i], i);
  }
  std::shuffle(labels.begin(), labels.end(), rng_);
  Statistic kappa(fiber_sizes.size(), labels);
  const auto fibers = kappa.fibers();
  std::vector<std::vector<double>> rows(fiber_sizes.size(), std::vector<double>(labels.size(), 0.0));
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    const auto w = dirichlet(fibers[i].size());
    for (std::size_t t = 0; t < w.size(); ++t) rows[i][fibers[i][t]] = w[t];
  }
  return {kernel_from_statistic(kappa, rows), std::move(kappa)};
}

MarkovKernel KernelGenerator::arbitrary(std::size_t source_size, std::size_t target_size, double sparsity) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, target_size - 1);
  std::vector<std::vector<double>> rows;
  rows.reserve(source_size);
  for (std::size_t i = 0; i < source_size; ++i) {
    auto w = dirichlet(target_size);
    const std::size_t keep = pick(rng_);
    for (std::size_t j = 0; j < target_size; ++j) {
      if (j != keep && sparsity > 0.0 && unit(rng_) < sparsity) w[j] = 0.0;
    }
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= sum;
    rows.push_back(std::move(w));
  }
  return MarkovKernel::from_rows(rows);
}

std::pair<MarkovKernel, Statistic> random_congruent_kernel(std::size_t source_size,
                                                           std::span<const std::size_t> fiber_sizes,
                                                           std::uint64_t seed) {
  if (fiber_sizes.size() != source_size) {
    throw Error(Errc::kInvalidFiberSizes, "need exactly one fibre size per source point");
  }
  KernelGenerator gen(seed);
  return gen.congruent(fiber_sizes);
}

}  // namespace congruent
