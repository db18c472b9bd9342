#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "congruent/markov.hpp"
#include "congruent/measure.hpp"
#include "congruent/partition.hpp"
#include "congruent/rational.hpp"

namespace congruent {

/// Evaluates a tensor field at a base point on a list of tangent vectors.
/// Must be reentrant: the classifier may call it from several threads.
using TensorEvaluator = std::function<double(const RMeasure& base, std::span<const RMeasure> tangents)>;

/// A family of n-multilinear forms of regularity r, one for every finite
/// index set: the base point is an element of S^r(I) and the n tangent
/// vectors live in S^r(I) on the same index set.
///
/// Continuity in the base point is assumed, not checked.
class TensorFieldOracle {
 public:
  TensorFieldOracle(int degree, Rational regularity, TensorEvaluator evaluator);

  int degree() const noexcept { return degree_; }
  const Rational& regularity() const noexcept { return regularity_; }

  /// Checks the tangent count, index set sizes and exponents before
  /// delegating to the evaluator.
  double operator()(const RMeasure& base, std::span<const RMeasure> tangents) const;

 private:
  int degree_;
  Rational regularity_;
  std::shared_ptr<const TensorEvaluator> evaluator_;
};

/// Component of tau^n_{I;r} at mu_r on delta_{i_1}^r, ..., delta_{i_n}^r
/// without the 1/r^n normalization: |m_i|^{1/r - n} for a constant
/// multiindex (i, ..., i), 0 otherwise.
double canonical_component(const RMeasure& mu_r, std::span<const std::size_t> multiindex);

/// L^n(nu_1, ..., nu_n) = n^n sum_i prod_j nu_{j,i}, all nu_j of exponent 1/n.
double L_n_eval(std::span<const RMeasure> nus);

/// tau^n_{I;r} at mu_r (r = exponent of mu_r, n = tangents.size()):
/// r^{-n} sum_i |m_i|^{1/r - n} prod_j v_{j,i}.
double canonical_tensor_eval(const RMeasure& mu_r, std::span<const RMeasure> tangents);

/// tau^P at mu_r: product over blocks of P of the canonical tensor of the
/// block's size applied to the block's tangents.
double tau_P_eval(const Partition& p, const RMeasure& mu_r, std::span<const RMeasure> tangents);

/// Exponent-one basis component (tau^P_I)_mu(delta_{i_1}, ..., delta_{i_n})
/// for any field type (double, exact rationals): the product over blocks of
/// m_i^{1-k} when the block's indices coincide at i, else 0.
template <class Scalar>
Scalar partition_basis_component(const Partition& p, std::span<const Scalar> coeffs,
                                 std::span<const std::size_t> multiindex) {
  Scalar value(1);
  for (const auto& block : p.blocks()) {
    const std::size_t i = multiindex[block.front()];
    for (int k : block) {
      if (multiindex[k] != i) return Scalar(0);
    }
    const Scalar m = coeffs[i];
    for (std::size_t e = 1; e < block.size(); ++e) value /= m;
  }
  return value;
}

/// The constant family 1 of degree 0.
TensorFieldOracle unit_oracle(Rational regularity);
/// tau^n_{;r}; equals L^n when r = 1/n.
TensorFieldOracle canonical_tensor(int n, Rational regularity);
/// L^n on S^{1/n}.
TensorFieldOracle canonical_form(int n);
TensorFieldOracle partition_tensor(const Partition& p, Rational regularity);

/// (A (x) B)(v_1..v_{n+m}) = A(v_1..v_n) B(v_{n+1}..v_{n+m}).
TensorFieldOracle tensor_product(const TensorFieldOracle& a, const TensorFieldOracle& b);

/// (P_sigma A)(v_1..v_n) = A(v_{sigma^{-1}(1)}, ..., v_{sigma^{-1}(n)}) with
/// sigma[k] the image of k. P_{s1} P_{s2} = P_{s2 o s1}.
TensorFieldOracle permute(std::span<const int> sigma, const TensorFieldOracle& a);

/// K_r^* A: evaluates A at K_r(mu_r) on the formal derivatives of the
/// tangents. Only defined on index sets of size kernel.source_size() and on
/// nonnegative base points.
TensorFieldOracle pullback_markov(const MarkovKernel& kernel, const TensorFieldOracle& a);

/// sum_t weight_t(||mu_r^{1/r}||) A_t for oracles of a common degree and
/// regularity.
TensorFieldOracle linear_combination(std::vector<std::function<double(double)>> weights,
                                     std::vector<TensorFieldOracle> terms);

}  // namespace congruent
