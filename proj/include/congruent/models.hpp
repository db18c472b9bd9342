#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "congruent/markov.hpp"

namespace congruent {

/// Minimal coefficient accepted at evaluation; keeps log-derivatives finite.
inline constexpr double kPositivityMargin = 1e-8;

/// Axis-aligned open parameter box.
struct ParameterBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  bool contains(const Eigen::VectorXd& xi) const;
};

/// A map xi -> p(xi) from an open box in R^d into strictly positive finite
/// measures on {0, ..., index_size-1}.
///
/// Without an exact Jacobian, derivatives come from central differences with
/// step 1e-5 * max(1, |xi_a|) (error O(h^2)).
class ParametrizedModel {
 public:
  using Evaluator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
  using Jacobian = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

  ParametrizedModel(std::string name, std::size_t index_size, ParameterBox box, Evaluator eval,
                    std::optional<Jacobian> jacobian, bool is_statistical);

  const std::string& name() const noexcept { return name_; }
  std::size_t param_dim() const noexcept { return static_cast<std::size_t>(box_.lower.size()); }
  std::size_t index_size() const noexcept { return index_size_; }
  const ParameterBox& box() const noexcept { return box_; }
  bool is_statistical() const noexcept { return statistical_; }
  bool has_exact_jacobian() const noexcept { return jacobian_.has_value(); }

  /// p(xi). Throws OutsideParameterBox, or BoundarySingularity when some
  /// p_i(xi) <= kPositivityMargin.
  Eigen::VectorXd evaluate(const Eigen::VectorXd& xi) const;

  /// |I| x d matrix of dp_i / dxi_a.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& xi) const;

  /// Raw evaluator: no box or positivity checks.
  Eigen::VectorXd evaluate_unchecked(const Eigen::VectorXd& xi) const { return eval_(xi); }

 private:
  std::string name_;
  std::size_t index_size_;
  ParameterBox box_;
  Evaluator eval_;
  std::optional<Jacobian> jacobian_;
  bool statistical_;
};

/// (d_v p)_i / p_i.
Eigen::VectorXd log_derivative(const ParametrizedModel& model, const Eigen::VectorXd& xi,
                               const Eigen::VectorXd& v);

/// tau^n(v_1..v_n) = sum_i prod_j (d_{v_j} log p)_i p_i, with n = directions.size().
double model_tensor(const ParametrizedModel& model, const Eigen::VectorXd& xi,
                    std::span<const Eigen::VectorXd> directions);

/// The same tensor through the pullback (p^{1/n})^* L^n: directional
/// derivatives of p^{1/n} by central differences of step `step`, then L^n.
/// Independent of the log-derivative path.
double model_tensor_pullback(const ParametrizedModel& model, const Eigen::VectorXd& xi,
                             std::span<const Eigen::VectorXd> directions, double step = 1e-5);

Eigen::MatrixXd fisher_metric(const ParametrizedModel& model, const Eigen::VectorXd& xi);

/// Fully symmetric d x d x d array, flattened as [a * d * d + b * d + c].
std::vector<double> amari_chentsov(const ParametrizedModel& model, const Eigen::VectorXd& xi);

/// All d^n components of tau^n on the coordinate directions, row-major.
std::vector<double> model_tensor_components(const ParametrizedModel& model, const Eigen::VectorXd& xi, int n);

/// sum_i |(d_v log p)_i|^k p_i, the k-th power of the L^k(p) norm.
double log_derivative_moment(const ParametrizedModel& model, const Eigen::VectorXd& xi,
                             const Eigen::VectorXd& v, double k);

/// p' = K_* p with Jacobian K^T dp. Statistical models stay statistical.
ParametrizedModel pushforward_model(const ParametrizedModel& model, const MarkovKernel& kernel);

namespace zoo {

/// p(xi) = (xi, 1 - xi) on (0, 1).
ParametrizedModel bernoulli();

/// Full simplex over m points, xi = first m-1 probabilities.
ParametrizedModel categorical_simplex(std::size_t m);

/// p_i(xi) proportional to exp(xi . f_i); `features` is |I| x d. The box is
/// (-bound, bound)^d.
ParametrizedModel exponential_family(Eigen::MatrixXd features, double bound = 10.0);

/// Unnormalized p_i(xi) = exp(xi . f_i).
ParametrizedModel unnormalized_exponential_family(Eigen::MatrixXd features, double bound = 10.0);

/// Appends a total-mass parameter t > 0: p(xi, t) = t * q(xi).
ParametrizedModel with_total_mass(const ParametrizedModel& base, double max_mass = 1e6);

/// p(xi) = base + directions * xi on the given box.
ParametrizedModel affine(Eigen::VectorXd base, Eigen::MatrixXd directions, ParameterBox box);

}  // namespace zoo

}  // namespace congruent
