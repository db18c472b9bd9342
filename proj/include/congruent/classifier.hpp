#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "congruent/measure.hpp"
#include "congruent/partition.hpp"
#include "congruent/tensor.hpp"

namespace congruent {

enum class Space { kMeasures, kProbabilities };

/// One term a_P(||mu||) tau^P of a canonical expansion.
struct ExpansionTerm {
  Partition partition;
  std::function<double(double)> coefficient;
};

/// sum_P a_P(||mu_r^{1/r}||) tau^P_{;r}. Terms must share the degree.
TensorFieldOracle synthesize(int degree, Rational regularity, const std::vector<ExpansionTerm>& terms);

/// Unique canonical expansion recovered from a congruent family.
///
/// For Space::kMeasures, `coefficients[p][l]` is a_P(lambda_grid[l]) for
/// every partition of the degree. For Space::kProbabilities the grid is {1},
/// `partitions` lists the singleton-free partitions with their constants
/// c_P, and the coefficients of partitions containing a singleton (which
/// vanish on the simplex) are kept separately in `absorbed`.
struct Decomposition {
  int degree = 0;
  Rational regularity{1};
  Space space = Space::kMeasures;
  std::vector<double> lambda_grid;
  std::vector<Partition> partitions;
  std::vector<std::vector<double>> coefficients;
  std::vector<Partition> absorbed;
  std::vector<double> absorbed_coefficients;
  std::size_t probe_size = 0;
  std::size_t verification_points = 0;
  /// Max |oracle - reconstruction| over the verification sample.
  double residual = 0.0;
  /// Largest disagreement between two representative multiindices of a
  /// partition at a center.
  double representative_spread = 0.0;
  double tolerance = 0.0;
  /// Set when residual or spread exceed the tolerance: the input was not a
  /// congruent family, and the coefficients carry no meaning.
  bool non_congruent = false;

  std::optional<std::size_t> index_of(const Partition& p) const;
  /// Coefficient of p at lambda_grid[l] (0 for absent partitions).
  double coefficient(const Partition& p, std::size_t l = 0) const;
  /// The reconstruction sum_P a_P tau^P, evaluable where ||mu|| lies on the
  /// grid (Space::kMeasures) or at probability measures
  /// (Space::kProbabilities).
  TensorFieldOracle reconstruction() const;
};

struct DecomposeOptions {
  std::vector<double> lambda_grid{0.5, 1.0, 2.0, 4.0};
  /// Index set size used for probing; 0 selects degree + 2.
  std::size_t probe_size = 0;
  std::size_t verification_points = 200;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
  /// Upper bound on worker threads; the oracle must be reentrant when > 1.
  unsigned max_threads = 1;
};

/// Value and representative disagreement of a center probe.
struct CenterProbe {
  double value = 0.0;
  double spread = 0.0;
};

/// theta^P at lambda c_I: the oracle (pulled back to exponent one through
/// pi^r) evaluated on delta_{i_1}, ..., delta_{i_n} for a multiindex whose
/// induced partition is P. A second representative is evaluated when the
/// index set permits and its difference reported as `spread`.
CenterProbe probe_center(const TensorFieldOracle& oracle, std::size_t index_size, double lambda, const Partition& p);

double center_component(const TensorFieldOracle& oracle, std::size_t index_size, double lambda, const Partition& p);

/// Minimal-first elimination on M_+: recovers a_P on the lambda grid and
/// reports the residual over rational verification measures.
Decomposition decompose_on_M(const TensorFieldOracle& oracle, const DecomposeOptions& options = {});

/// Extends a family defined on probability measures to M_+ through the
/// normalization mu -> mu/||mu||, decomposes there, and reads off
/// c_P = a_P(1) on the singleton-free partitions.
Decomposition decompose_on_P(const TensorFieldOracle& oracle, const DecomposeOptions& options = {});

/// V_i = 2 delta_(0,i) - delta_(1,i) - delta_(2,i) on J = {0,1,2} x I, where
/// the point (a, i) has index a * |I| + i.
std::vector<SignedMeasure> probe_vectors_V(std::size_t base_size);

/// Matrix M[P][Q] = tau^P at c_J on (V_{i_1}, ..., V_{i_n}) with i a
/// representative of Q, for P, Q singleton-free partitions of n (in
/// enumeration order). Triangular with nonzero diagonal.
std::vector<std::vector<double>> singleton_free_probe_matrix(int n);

}  // namespace congruent
