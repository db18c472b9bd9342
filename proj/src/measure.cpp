#include "congruent/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "congruent/error.hpp"

namespace congruent {

namespace {

double signed_power(double x, double k) {
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), k), x);
}

}  // namespace

RMeasure::RMeasure(std::vector<double> coeffs, Rational exponent)
    : coeffs_(std::move(coeffs)), exponent_(exponent) {
  if (coeffs_.empty()) throw Error(Errc::kInvalidArgument, "index set must be nonempty");
  if (exponent_ <= 0) {
    throw Error(Errc::kExponentOutOfRange, "exponent " + to_string(exponent_) + " is not positive");
  }
  if (exponent_ > 1 && !is_strictly_positive()) {
    throw Error(Errc::kExponentOutOfRange,
                "exponent " + to_string(exponent_) + " > 1 requires strictly positive coefficients");
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw Error(Errc::kInvalidArgument, "non-finite coefficient");
  }
}

bool RMeasure::is_nonnegative() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c >= 0.0; });
}

bool RMeasure::is_strictly_positive() const noexcept {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c > 0.0; });
}

double RMeasure::total_mass() const noexcept {
  return std::accumulate(coeffs_.begin(), coeffs_.end(), 0.0);
}

double norm(const RMeasure& mu) {
  const double p = to_double(1 / mu.exponent());
  double sum = 0.0;
  for (double c : mu.coeffs()) sum += c == 0.0 ? 0.0 : std::pow(std::abs(c), p);
  return sum;
}

RMeasure power_map(const RMeasure& mu, const Rational& k) {
  if (k <= 0) throw Error(Errc::kExponentOutOfRange, "power " + to_string(k) + " is not positive");
  const Rational target = k * mu.exponent();
  if (target > 1 && !mu.is_strictly_positive()) {
    throw Error(Errc::kExponentOutOfRange,
                "power " + to_string(k) + " maps exponent " + to_string(mu.exponent()) +
                    " beyond 1 on a measure that is not strictly positive");
  }
  if (k == Rational(1)) return mu;
  const double kd = to_double(k);
  std::vector<double> out(mu.size());
  std::transform(mu.coeffs().begin(), mu.coeffs().end(), out.begin(),
                 [kd](double c) { return signed_power(c, kd); });
  return RMeasure(std::move(out), target);
}

RMeasure product(const RMeasure& mu, const RMeasure& nu) {
  if (mu.size() != nu.size()) {
    throw Error(Errc::kDimensionMismatch, "product of measures on index sets of different size");
  }
  const Rational target = mu.exponent() + nu.exponent();
  if (target > 1) {
    throw Error(Errc::kExponentOutOfRange, "product exponent " + to_string(target) + " exceeds 1");
  }
  std::vector<double> out(mu.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mu[i] * nu[i];
  return RMeasure(std::move(out), target);
}

SignedMeasure center(std::size_t index_size, double lambda) {
  if (index_size == 0) throw Error(Errc::kInvalidArgument, "index set must be nonempty");
  if (!(lambda > 0.0)) throw Error(Errc::kInvalidArgument, "center scale must be positive");
  return SignedMeasure(std::vector<double>(index_size, lambda / static_cast<double>(index_size)));
}

RMeasure dirac(std::size_t index_size, std::size_t i, Rational exponent) {
  if (i >= index_size) throw Error(Errc::kDimensionMismatch, "dirac index out of range");
  std::vector<double> c(index_size, 0.0);
  c[i] = 1.0;
  return RMeasure(std::move(c), exponent);
}

RMeasure operator+(const RMeasure& a, const RMeasure& b) {
  if (a.size() != b.size()) throw Error(Errc::kDimensionMismatch, "sum of measures of different size");
  if (a.exponent() != b.exponent()) throw Error(Errc::kExponentMismatch, "sum of measures of different exponent");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
  return RMeasure(std::move(out), a.exponent());
}

RMeasure operator*(double s, const RMeasure& a) {
  std::vector<double> out(a.coeffs().begin(), a.coeffs().end());
  for (double& c : out) c *= s;
  return RMeasure(std::move(out), a.exponent());
}

}  // namespace congruent
