#include "congruent/tensor.hpp"

#include <algorithm>
#include <string>

#include "congruent/error.hpp"

namespace congruent {

namespace {

void require_regular_base(const RMeasure& mu_r, const Rational& power) {
  if (power >= 0) return;
  for (std::size_t i = 0; i < mu_r.size(); ++i) {
    if (std::abs(mu_r[i]) < kBoundaryThreshold) {
      throw Error(Errc::kBoundarySingularity, "coefficient " + std::to_string(i) +
                                                  " vanishes where the canonical tensor needs |m_i|^" +
                                                  to_string(power));
    }
  }
}

double abs_power(double m, const Rational& power) {
  if (power == Rational(0)) return 1.0;
  if (m == 0.0) return 0.0;
  if (power.denominator() == 1) {
    const double base = std::abs(m);
    const auto e = power.numerator();
    return e > 0 ? std::pow(base, static_cast<double>(e)) : 1.0 / std::pow(base, static_cast<double>(-e));
  }
  return std::pow(std::abs(m), to_double(power));
}

void check_tangents(const RMeasure& base, std::span<const RMeasure> tangents) {
  for (const auto& v : tangents) {
    if (v.size() != base.size()) throw Error(Errc::kDimensionMismatch, "tangent lives on a different index set");
    if (v.exponent() != base.exponent()) {
      throw Error(Errc::kExponentMismatch, "tangent exponent " + to_string(v.exponent()) +
                                               " differs from base exponent " + to_string(base.exponent()));
    }
  }
}

}  // namespace

TensorFieldOracle::TensorFieldOracle(int degree, Rational regularity, TensorEvaluator evaluator)
    : degree_(degree),
      regularity_(regularity),
      evaluator_(std::make_shared<const TensorEvaluator>(std::move(evaluator))) {
  if (degree_ < 0) throw Error(Errc::kInvalidArgument, "tensor degree must be nonnegative");
  if (regularity_ <= 0 || regularity_ > 1) {
    throw Error(Errc::kExponentOutOfRange, "regularity " + to_string(regularity_) + " outside (0,1]");
  }
}

double TensorFieldOracle::operator()(const RMeasure& base, std::span<const RMeasure> tangents) const {
  if (static_cast<int>(tangents.size()) != degree_) {
    throw Error(Errc::kDegreeMismatch, "tensor of degree " + std::to_string(degree_) + " given " +
                                           std::to_string(tangents.size()) + " tangents");
  }
  if (base.exponent() != regularity_) {
    throw Error(Errc::kRegularityMismatch, "base exponent " + to_string(base.exponent()) +
                                               " differs from regularity " + to_string(regularity_));
  }
  check_tangents(base, tangents);
  return (*evaluator_)(base, tangents);
}

double canonical_component(const RMeasure& mu_r, std::span<const std::size_t> multiindex) {
  const auto n = static_cast<std::int64_t>(multiindex.size());
  if (n == 0) throw Error(Errc::kInvalidArgument, "empty multiindex");
  const Rational power = 1 / mu_r.exponent() - n;
  require_regular_base(mu_r, power);
  const std::size_t i = multiindex.front();
  if (i >= mu_r.size()) throw Error(Errc::kDimensionMismatch, "multiindex entry out of range");
  if (!std::all_of(multiindex.begin(), multiindex.end(), [i](std::size_t k) { return k == i; })) return 0.0;
  return abs_power(mu_r[i], power);
}

double L_n_eval(std::span<const RMeasure> nus) {
  if (nus.empty()) throw Error(Errc::kInvalidArgument, "L^n needs at least one argument");
  const auto n = static_cast<std::int64_t>(nus.size());
  const Rational expected(1, n);
  for (const auto& nu : nus) {
    if (nu.exponent() != expected) {
      throw Error(Errc::kExponentMismatch, "L^" + std::to_string(n) + " expects exponent 1/" + std::to_string(n));
    }
    if (nu.size() != nus.front().size()) throw Error(Errc::kDimensionMismatch, "arguments on different index sets");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < nus.front().size(); ++i) {
    double term = 1.0;
    for (const auto& nu : nus) term *= nu[i];
    sum += term;
  }
  return std::pow(static_cast<double>(n), static_cast<double>(n)) * sum;
}

double canonical_tensor_eval(const RMeasure& mu_r, std::span<const RMeasure> tangents) {
  const auto n = static_cast<std::int64_t>(tangents.size());
  if (n == 0) throw Error(Errc::kInvalidArgument, "canonical tensor needs at least one argument");
  check_tangents(mu_r, tangents);
  const Rational r = mu_r.exponent();
  const Rational power = 1 / r - n;
  require_regular_base(mu_r, power);
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_r.size(); ++i) {
    double term = 1.0;
    for (const auto& v : tangents) term *= v[i];
    if (term == 0.0) continue;
    sum += term * abs_power(mu_r[i], power);
  }
  // r^{-n}
  return sum * abs_power(to_double(r), Rational(-n));
}

double tau_P_eval(const Partition& p, const RMeasure& mu_r, std::span<const RMeasure> tangents) {
  if (static_cast<int>(tangents.size()) != p.degree()) {
    throw Error(Errc::kDegreeMismatch, "partition of degree " + std::to_string(p.degree()) + " given " +
                                           std::to_string(tangents.size()) + " tangents");
  }
  double value = 1.0;
  std::vector<RMeasure> slot;
  for (const auto& block : p.blocks()) {
    slot.clear();
    for (int k : block) slot.push_back(tangents[k]);
    value *= canonical_tensor_eval(mu_r, slot);
  }
  return value;
}

TensorFieldOracle unit_oracle(Rational regularity) {
  return TensorFieldOracle(0, regularity, [](const RMeasure&, std::span<const RMeasure>) { return 1.0; });
}

TensorFieldOracle canonical_tensor(int n, Rational regularity) {
  if (n < 1) throw Error(Errc::kInvalidArgument, "canonical tensor degree must be at least 1");
  return TensorFieldOracle(n, regularity, [](const RMeasure& base, std::span<const RMeasure> tangents) {
    return canonical_tensor_eval(base, tangents);
  });
}

TensorFieldOracle canonical_form(int n) {
  if (n < 1) throw Error(Errc::kInvalidArgument, "canonical form degree must be at least 1");
  return TensorFieldOracle(n, Rational(1, n), [](const RMeasure&, std::span<const RMeasure> tangents) {
    return L_n_eval(tangents);
  });
}

TensorFieldOracle partition_tensor(const Partition& p, Rational regularity) {
  return TensorFieldOracle(p.degree(), regularity, [p](const RMeasure& base, std::span<const RMeasure> tangents) {
    return tau_P_eval(p, base, tangents);
  });
}

TensorFieldOracle tensor_product(const TensorFieldOracle& a, const TensorFieldOracle& b) {
  if (a.regularity() != b.regularity()) {
    throw Error(Errc::kRegularityMismatch, "tensor product of families with different regularity");
  }
  const int n = a.degree();
  return TensorFieldOracle(n + b.degree(), a.regularity(),
                           [a, b, n](const RMeasure& base, std::span<const RMeasure> tangents) {
                             return a(base, tangents.first(n)) * b(base, tangents.subspan(n));
                           });
}

TensorFieldOracle permute(std::span<const int> sigma, const TensorFieldOracle& a) {
  const int n = a.degree();
  if (static_cast<int>(sigma.size()) != n) throw Error(Errc::kDegreeMismatch, "permutation of wrong degree");
  std::vector<int> inverse(n, -1);
  for (int k = 0; k < n; ++k) {
    if (sigma[k] < 0 || sigma[k] >= n || inverse[sigma[k]] != -1) {
      throw Error(Errc::kInvalidArgument, "not a permutation");
    }
    inverse[sigma[k]] = k;
  }
  return TensorFieldOracle(n, a.regularity(), [a, inverse](const RMeasure& base, std::span<const RMeasure> tangents) {
    std::vector<RMeasure> shuffled;
    shuffled.reserve(tangents.size());
    for (int k : inverse) shuffled.push_back(tangents[k]);
    return a(base, shuffled);
  });
}

TensorFieldOracle pullback_markov(const MarkovKernel& kernel, const TensorFieldOracle& a) {
  return TensorFieldOracle(
      a.degree(), a.regularity(), [kernel, a](const RMeasure& base, std::span<const RMeasure> tangents) {
        if (base.size() != kernel.source_size()) {
          throw Error(Errc::kDimensionMismatch, "pullback evaluated off the kernel's source index set");
        }
        if (!base.is_nonnegative()) throw Error(Errc::kInvalidArgument, "pullback needs a nonnegative base point");
        const auto mu = power_map(base, 1 / base.exponent());
        std::vector<RMeasure> pushed;
        pushed.reserve(tangents.size());
        for (const auto& v : tangents) pushed.push_back(formal_derivative(kernel, mu, v));
        return a(apply_K_r(kernel, base), pushed);
      });
}

TensorFieldOracle linear_combination(std::vector<std::function<double(double)>> weights,
                                     std::vector<TensorFieldOracle> terms) {
  if (weights.size() != terms.size() || terms.empty()) {
    throw Error(Errc::kInvalidArgument, "linear combination needs one weight per term");
  }
  for (const auto& t : terms) {
    if (t.degree() != terms.front().degree()) throw Error(Errc::kDegreeMismatch, "terms of different degree");
    if (t.regularity() != terms.front().regularity()) {
      throw Error(Errc::kRegularityMismatch, "terms of different regularity");
    }
  }
  const int n = terms.front().degree();
  const Rational r = terms.front().regularity();
  return TensorFieldOracle(n, r, [weights = std::move(weights), terms = std::move(terms)](
                                     const RMeasure& base, std::span<const RMeasure> tangents) {
    const double mass = norm(base);
    double sum = 0.0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const double w = weights[t](mass);
      if (w != 0.0) sum += w * terms[t](base, tangents);
    }
    return sum;
  });
}

}  // namespace congruent
