#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "congruent/rational.hpp"

namespace congruent {

/// Coefficients below this magnitude count as boundary points wherever a
/// negative power of a coefficient would be taken.
inline constexpr double kBoundaryThreshold = 1e-300;

/// An element mu_r = sum_i mu_i delta_i^r of the space of r-th powers of
/// signed measures on the finite index set {0, ..., size-1}.
///
/// The exponent lies in (0, 1]. Exponents above 1 are admitted only for
/// strictly positive coefficient vectors, where the power maps are defined
/// for every exponent.
class RMeasure {
 public:
  explicit RMeasure(std::vector<double> coeffs, Rational exponent = Rational(1));

  std::size_t size() const noexcept { return coeffs_.size(); }
  const Rational& exponent() const noexcept { return exponent_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](std::size_t i) const { return coeffs_[i]; }

  bool is_nonnegative() const noexcept;
  bool is_strictly_positive() const noexcept;

  /// Sum of the raw coefficients. For exponent 1 this is the total mass.
  double total_mass() const noexcept;

 private:
  std::vector<double> coeffs_;
  Rational exponent_;
};

/// Signed finite measures are the exponent-one case.
using SignedMeasure = RMeasure;

/// sum_i |mu_i|^(1/r).
double norm(const RMeasure& mu);

/// Componentwise sign(mu_i) |mu_i|^k; the result carries exponent k*r.
RMeasure power_map(const RMeasure& mu, const Rational& k);

/// Componentwise product; exponents add and must not exceed 1.
RMeasure product(const RMeasure& mu, const RMeasure& nu);

/// lambda times the uniform distribution on `index_size` points.
SignedMeasure center(std::size_t index_size, double lambda);

/// delta_i^r on an index set of the given size.
RMeasure dirac(std::size_t index_size, std::size_t i, Rational exponent = Rational(1));

RMeasure operator+(const RMeasure& a, const RMeasure& b);
RMeasure operator*(double s, const RMeasure& a);

}  // namespace congruent
