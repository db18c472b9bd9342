#include "congruent/models.hpp"

#include <cmath>
#include <string>

#include "congruent/error.hpp"
#include "congruent/tensor.hpp"

namespace congruent {

namespace {

constexpr double kStatisticalTolerance = 1e-10;

void require_dim(const ParametrizedModel& model, const Eigen::VectorXd& v, const char* what) {
  if (static_cast<std::size_t>(v.size()) != model.param_dim()) {
    throw Error(Errc::kDimensionMismatch, std::string(what) + " has dimension " + std::to_string(v.size()) +
                                              ", model has " + std::to_string(model.param_dim()));
  }
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double top = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - top).exp();
  return e / e.sum();
}

}  // namespace

bool ParameterBox::contains(const Eigen::VectorXd& xi) const {
  if (xi.size() != lower.size()) return false;
  for (Eigen::Index a = 0; a < xi.size(); ++a) {
    if (!(xi[a] > lower[a] && xi[a] < upper[a])) return false;
  }
  return true;
}

ParametrizedModel::ParametrizedModel(std::string name, std::size_t index_size, ParameterBox box, Evaluator eval,
                                     std::optional<Jacobian> jacobian, bool is_statistical)
    : name_(std::move(name)),
      index_size_(index_size),
      box_(std::move(box)),
      eval_(std::move(eval)),
      jacobian_(std::move(jacobian)),
      statistical_(is_statistical) {
  if (index_size_ == 0) throw Error(Errc::kInvalidArgument, "model index set must be nonempty");
  if (box_.lower.size() == 0 || box_.lower.size() != box_.upper.size()) {
    throw Error(Errc::kInvalidArgument, "parameter box bounds must be nonempty and of equal dimension");
  }
  if (((box_.upper - box_.lower).array() <= 0.0).any()) {
    throw Error(Errc::kInvalidArgument, "parameter box is empty");
  }
}

Eigen::VectorXd ParametrizedModel::evaluate(const Eigen::VectorXd& xi) const {
  if (static_cast<std::size_t>(xi.size()) != param_dim()) {
    throw Error(Errc::kDimensionMismatch, "parameter of wrong dimension");
  }
  if (!box_.contains(xi)) throw Error(Errc::kOutsideParameterBox, "parameter outside the model's box");
  Eigen::VectorXd p = eval_(xi);
  if (static_cast<std::size_t>(p.size()) != index_size_) {
    throw Error(Errc::kDimensionMismatch, "model evaluator returned wrong number of coefficients");
  }
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p[i] > kPositivityMargin)) {
      throw Error(Errc::kBoundarySingularity, "p_" + std::to_string(i) + " = " + std::to_string(p[i]) +
                                                  " is not above the positivity margin");
    }
  }
  if (statistical_ && std::abs(p.sum() - 1.0) > kStatisticalTolerance) {
    throw Error(Errc::kInvalidArgument, "statistical model evaluated to total mass " + std::to_string(p.sum()));
  }
  return p;
}

Eigen::MatrixXd ParametrizedModel::jacobian(const Eigen::VectorXd& xi) const {
  if (jacobian_) {
    Eigen::MatrixXd j = (*jacobian_)(xi);
    if (static_cast<std::size_t>(j.rows()) != index_size_ || static_cast<std::size_t>(j.cols()) != param_dim()) {
      throw Error(Errc::kDimensionMismatch, "model Jacobian has wrong shape");
    }
    return j;
  }
  Eigen::MatrixXd j(index_size_, param_dim());
  for (std::size_t a = 0; a < param_dim(); ++a) {
    const double h = 1e-5 * std::max(1.0, std::abs(xi[a]));
    Eigen::VectorXd plus = xi;
    Eigen::VectorXd minus = xi;
    plus[a] += h;
    minus[a] -= h;
    j.col(a) = (eval_(plus) - eval_(minus)) / (2.0 * h);
  }
  return j;
}

Eigen::VectorXd log_derivative(const ParametrizedModel& model, const Eigen::VectorXd& xi, const Eigen::VectorXd& v) {
  require_dim(model, v, "direction");
  const Eigen::VectorXd p = model.evaluate(xi);
  const Eigen::VectorXd dp = model.jacobian(xi) * v;
  return dp.cwiseQuotient(p);
}

double model_tensor(const ParametrizedModel& model, const Eigen::VectorXd& xi,
                    std::span<const Eigen::VectorXd> directions) {
  const Eigen::VectorXd p = model.evaluate(xi);
  const Eigen::MatrixXd jac = model.jacobian(xi);
  Eigen::ArrayXd integrand = p.array();
  for (const auto& v : directions) {
    require_dim(model, v, "direction");
    integrand *= (jac * v).cwiseQuotient(p).array();
  }
  return integrand.sum();
}

double model_tensor_pullback(const ParametrizedModel& model, const Eigen::VectorXd& xi,
                             std::span<const Eigen::VectorXd> directions, double step) {
  const auto n = static_cast<std::int64_t>(directions.size());
  if (n == 0) throw Error(Errc::kInvalidArgument, "pullback path needs at least one direction");
  model.evaluate(xi);
  const Rational root(1, n);
  auto root_of = [&](const Eigen::VectorXd& at) {
    const Eigen::VectorXd p = model.evaluate_unchecked(at);
    return power_map(RMeasure(std::vector<double>(p.data(), p.data() + p.size())), root);
  };
  std::vector<RMeasure> derivatives;
  derivatives.reserve(directions.size());
  for (const auto& v : directions) {
    require_dim(model, v, "direction");
    const auto plus = root_of(xi + step * v);
    const auto minus = root_of(xi - step * v);
    std::vector<double> d(plus.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (plus[i] - minus[i]) / (2.0 * step);
    derivatives.emplace_back(std::move(d), root);
  }
  return L_n_eval(derivatives);
}

std::vector<double> model_tensor_components(const ParametrizedModel& model, const Eigen::VectorXd& xi, int n) {
  if (n < 1) throw Error(Errc::kInvalidArgument, "tensor degree must be at least 1");
  const std::size_t d = model.param_dim();
  const Eigen::VectorXd p = model.evaluate(xi);
  const Eigen::MatrixXd scores = model.jacobian(xi).array().colwise() / p.array();
  std::size_t total = 1;
  for (int k = 0; k < n; ++k) total *= d;
  std::vector<double> out(total);
  std::vector<std::size_t> idx(n, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Eigen::ArrayXd integrand = p.array();
    for (int k = 0; k < n; ++k) integrand *= scores.col(idx[k]).array();
    out[flat] = integrand.sum();
    for (int k = n - 1; k >= 0; --k) {
      if (++idx[k] < d) break;
      idx[k] = 0;
    }
  }
  return out;
}

Eigen::MatrixXd fisher_metric(const ParametrizedModel& model, const Eigen::VectorXd& xi) {
  const std::size_t d = model.param_dim();
  const auto flat = model_tensor_components(model, xi, 2);
  Eigen::MatrixXd g(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) g(a, b) = flat[a * d + b];
  }
  return g;
}

std::vector<double> amari_chentsov(const ParametrizedModel& model, const Eigen::VectorXd& xi) {
  return model_tensor_components(model, xi, 3);
}

double log_derivative_moment(const ParametrizedModel& model, const Eigen::VectorXd& xi, const Eigen::VectorXd& v,
                             double k) {
  const Eigen::VectorXd p = model.evaluate(xi);
  const Eigen::VectorXd score = log_derivative(model, xi, v);
  return (score.array().abs().pow(k) * p.array()).sum();
}

ParametrizedModel pushforward_model(const ParametrizedModel& model, const MarkovKernel& kernel) {
  if (kernel.source_size() != model.index_size()) {
    throw Error(Errc::kDimensionMismatch, "kernel source size " + std::to_string(kernel.source_size()) +
                                              " does not match model index size " +
                                              std::to_string(model.index_size()));
  }
  Eigen::MatrixXd k(kernel.source_size(), kernel.target_size());
  for (std::size_t i = 0; i < kernel.source_size(); ++i) {
    for (std::size_t j = 0; j < kernel.target_size(); ++j) k(i, j) = kernel(i, j);
  }
  const Eigen::MatrixXd kt = k.transpose();
  ParametrizedModel::Evaluator eval = [model, kt](const Eigen::VectorXd& xi) -> Eigen::VectorXd {
    return kt * model.evaluate_unchecked(xi);
  };
  ParametrizedModel::Jacobian jac = [model, kt](const Eigen::VectorXd& xi) -> Eigen::MatrixXd {
    return kt * model.jacobian(xi);
  };
  return ParametrizedModel(model.name() + "|pushforward", kernel.target_size(), model.box(), std::move(eval),
                           std::move(jac), model.is_statistical());
}

namespace zoo {

ParametrizedModel bernoulli() {
  ParameterBox box{Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0)};
  return ParametrizedModel(
      "bernoulli", 2, box,
      [](const Eigen::VectorXd& xi) {
        Eigen::VectorXd p(2);
        p << xi[0], 1.0 - xi[0];
        return p;
      },
      [](const Eigen::VectorXd&) {
        Eigen::MatrixXd j(2, 1);
        j << 1.0, -1.0;
        return j;
      },
      true);
}

ParametrizedModel categorical_simplex(std::size_t m) {
  if (m < 2) throw Error(Errc::kInvalidArgument, "simplex model needs at least two points");
  const auto d = static_cast<Eigen::Index>(m - 1);
  ParameterBox box{Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)};
  return ParametrizedModel(
      "simplex", m, box,
      [m, d](const Eigen::VectorXd& xi) {
        Eigen::VectorXd p(static_cast<Eigen::Index>(m));
        p.head(d) = xi;
        p[d] = 1.0 - xi.sum();
        return p;
      },
      [m, d](const Eigen::VectorXd&) {
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), d);
        j.topRows(d).setIdentity();
        j.row(d).setConstant(-1.0);
        return j;
      },
      true);
}

ParametrizedModel exponential_family(Eigen::MatrixXd features, double bound) {
  const auto d = features.cols();
  const std::size_t m = static_cast<std::size_t>(features.rows());
  if (d == 0 || m == 0) throw Error(Errc::kInvalidArgument, "exponential family needs a nonempty feature matrix");
  ParameterBox box{Eigen::VectorXd::Constant(d, -bound), Eigen::VectorXd::Constant(d, bound)};
  return ParametrizedModel(
      "expfam", m, box, [features](const Eigen::VectorXd& xi) { return softmax(features * xi); },
      [features](const Eigen::VectorXd& xi) {
        const Eigen::VectorXd p = softmax(features * xi);
        const Eigen::RowVectorXd mean = p.transpose() * features;
        // dp_i/dxi_a = p_i (f_ia - E[f_a])
        return Eigen::MatrixXd((features.rowwise() - mean).array().colwise() * p.array());
      },
      true);
}

ParametrizedModel unnormalized_exponential_family(Eigen::MatrixXd features, double bound) {
  const auto d = features.cols();
  const std::size_t m = static_cast<std::size_t>(features.rows());
  if (d == 0 || m == 0) throw Error(Errc::kInvalidArgument, "exponential family needs a nonempty feature matrix");
  ParameterBox box{Eigen::VectorXd::Constant(d, -bound), Eigen::VectorXd::Constant(d, bound)};
  return ParametrizedModel(
      "expfam-unnormalized", m, box,
      [features](const Eigen::VectorXd& xi) { return Eigen::VectorXd((features * xi).array().exp()); },
      [features](const Eigen::VectorXd& xi) {
        const Eigen::ArrayXd p = (features * xi).array().exp();
        return Eigen::MatrixXd(features.array().colwise() * p);
      },
      false);
}

ParametrizedModel with_total_mass(const ParametrizedModel& base, double max_mass) {
  const auto d = static_cast<Eigen::Index>(base.param_dim());
  ParameterBox box{Eigen::VectorXd(d + 1), Eigen::VectorXd(d + 1)};
  box.lower << base.box().lower, 0.0;
  box.upper << base.box().upper, max_mass;
  ParametrizedModel::Evaluator eval = [base, d](const Eigen::VectorXd& xi) -> Eigen::VectorXd {
    return xi[d] * base.evaluate_unchecked(xi.head(d));
  };
  ParametrizedModel::Jacobian jac = [base, d](const Eigen::VectorXd& xi) -> Eigen::MatrixXd {
    Eigen::MatrixXd j(base.index_size(), d + 1);
    j.leftCols(d) = xi[d] * base.jacobian(xi.head(d));
    j.col(d) = base.evaluate_unchecked(xi.head(d));
    return j;
  };
  return ParametrizedModel(base.name() + "|mass", base.index_size(), box, std::move(eval), std::move(jac), false);
}

ParametrizedModel affine(Eigen::VectorXd base, Eigen::MatrixXd directions, ParameterBox box) {
  if (directions.rows() != base.size() || directions.cols() != box.lower.size()) {
    throw Error(Errc::kDimensionMismatch, "affine model directions must be |I| x d");
  }
  const bool statistical =
      std::abs(base.sum() - 1.0) <= kStatisticalTolerance && directions.colwise().sum().cwiseAbs().maxCoeff() <= 1e-12;
  const std::size_t m = static_cast<std::size_t>(base.size());
  return ParametrizedModel(
      "affine", m, std::move(box),
      [base, directions](const Eigen::VectorXd& xi) { return Eigen::VectorXd(base + directions * xi); },
      [directions](const Eigen::VectorXd&) { return directions; }, statistical);
}

}  // namespace zoo

}  // namespace congruent
