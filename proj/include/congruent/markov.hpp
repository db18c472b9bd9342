#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "congruent/measure.hpp"
#include "congruent/rational.hpp"

namespace congruent {

/// Row-stochastic matrix K^i_{i'}: row i is the probability measure K(i) on
/// the target index set.
class MarkovKernel {
 public:
  /// Validates nonnegativity and row sums (tolerance 1e-12), then
  /// renormalizes each row once.
  MarkovKernel(std::size_t source_size, std::size_t target_size, std::vector<double> row_major);

  static MarkovKernel from_rows(const std::vector<std::vector<double>>& rows);
  static MarkovKernel identity(std::size_t size);

  std::size_t source_size() const noexcept { return source_; }
  std::size_t target_size() const noexcept { return target_; }
  double operator()(std::size_t i, std::size_t i_prime) const { return entries_[i * target_ + i_prime]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(entries_).subspan(i * target_, target_);
  }

 private:
  std::size_t source_;
  std::size_t target_;
  std::vector<double> entries_;
};

/// A map kappa from I' = {0..source_size-1} to I = {0..target_size-1}.
class Statistic {
 public:
  Statistic(std::size_t target_size, std::vector<std::size_t> map);

  static Statistic identity(std::size_t size);

  std::size_t source_size() const noexcept { return map_.size(); }
  std::size_t target_size() const noexcept { return target_; }
  std::size_t operator[](std::size_t i_prime) const { return map_[i_prime]; }
  std::span<const std::size_t> map() const noexcept { return map_; }

  /// The fibres A_i = kappa^{-1}(i), each listed in increasing order.
  std::vector<std::vector<std::size_t>> fibers() const;

  /// The deterministic kernel i' -> delta_{kappa(i')}.
  MarkovKernel as_kernel() const;

 private:
  std::size_t target_;
  std::vector<std::size_t> map_;
};

/// K_*(mu) = sum_{i,i'} K^i_{i'} mu_i delta_{i'}. Requires exponent 1.
SignedMeasure pushforward(const MarkovKernel& kernel, const SignedMeasure& mu);

/// Deterministic push-forward kappa_* (fibre sums).
SignedMeasure pushforward(const Statistic& kappa, const SignedMeasure& mu);

/// Builds the kappa-congruent kernel whose row i is `fiber_weights[i]`, a
/// probability vector over I' with strictly positive entries exactly on
/// kappa^{-1}(i).
MarkovKernel kernel_from_statistic(const Statistic& kappa,
                                   const std::vector<std::vector<double>>& fiber_weights);

/// Congruent kernel spreading each point uniformly over its fibre.
MarkovKernel uniform_kernel_from_statistic(const Statistic& kappa);

/// True iff kappa_* K_* = Id. The support criterion (no mass outside the
/// fibre) and the composition on the delta basis are both evaluated; they
/// agree for every valid kernel.
bool is_congruent(const MarkovKernel& kernel, const Statistic& kappa);

/// K_r = pi^r K_* pi^{1/r}, with r the exponent of `mu_r`.
RMeasure apply_K_r(const MarkovKernel& kernel, const RMeasure& mu_r);

/// Formal derivative of K_r at the measure `mu`: writes v = phi mu^r and
/// returns d{K_*(phi mu)}/d mu' times mu'^r with mu' = K_* mu. Coefficients at
/// target points where mu' vanishes are 0.
RMeasure formal_derivative(const MarkovKernel& kernel, const SignedMeasure& mu, const RMeasure& v);

/// Seeded source of random kernels. Not thread-safe; use one per thread.
class KernelGenerator {
 public:
  explicit KernelGenerator(std::uint64_t seed) : rng_(seed) {}

  /// Congruent kernel with |kappa^{-1}(i)| = fiber_sizes[i]. Target points
  /// are assigned to fibres by a random permutation and the weights inside
  /// each fibre are symmetric Dirichlet(1).
  std::pair<MarkovKernel, Statistic> congruent(std::span<const std::size_t> fiber_sizes);

  /// Arbitrary kernel with Dirichlet(1) rows; each entry is zeroed with
  /// probability `sparsity` (at least one entry per row survives).
  MarkovKernel arbitrary(std::size_t source_size, std::size_t target_size, double sparsity = 0.0);

  std::mt19937_64& engine() noexcept { return rng_; }

 private:
  std::vector<double> dirichlet(std::size_t k);

  std::mt19937_64 rng_;
};

/// One-shot form of KernelGenerator::congruent. `source_size` must equal
/// fiber_sizes.size().
std::pair<MarkovKernel, Statistic> random_congruent_kernel(std::size_t source_size,
                                                           std::span<const std::size_t> fiber_sizes,
                                                           std::uint64_t seed);

}  // namespace congruent
