#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "congruent/classifier.hpp"
#include "congruent/markov.hpp"
#include "congruent/models.hpp"
#include "congruent/tensor.hpp"

namespace congruent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitVerification = 3;

std::string_view library_version();

struct JobSpec {
  std::string command;

  // Input files. `oracle` may also be a builtin reference such as
  // "builtin:fisher".
  std::optional<std::string> model;
  std::optional<std::string> kernel;
  std::optional<std::string> statistic;
  std::optional<std::string> measure;
  std::optional<std::string> oracle;

  std::optional<int> degree;
  std::vector<double> xi;
  std::string space = "M";
  std::string regularity = "1";
  std::vector<double> lambda_grid{0.5, 1.0, 2.0, 4.0};
  std::size_t probe_size = 0;
  std::size_t verification_points = 200;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
  unsigned threads = 1;
};

struct JobResult {
  int exit_code = kExitOk;
  std::string report;
};

/// Runs one job. Never throws: failures become exit codes and an "error"
/// entry in the report.
JobResult run(const JobSpec& job);

// Schema parsers, exposed for tests. All throw Error(Errc::kSchema) on
// malformed documents.
ParametrizedModel parse_model(const nlohmann::json& doc);
MarkovKernel parse_kernel(const nlohmann::json& doc);
/// A bare array, or an object with "map" and optional "target_size".
Statistic parse_statistic(const nlohmann::json& doc, std::optional<std::size_t> default_target);
SignedMeasure parse_measure(const nlohmann::json& doc);
TensorFieldOracle parse_oracle(const nlohmann::json& doc);
/// "builtin:<name>" or a path to an oracle document.
TensorFieldOracle resolve_oracle(const std::string& reference, std::optional<int> degree, Rational regularity);

/// JSON text with every floating-point number printed to 17 significant
/// digits and object keys in insertion order.
std::string serialize(const nlohmann::ordered_json& doc);

/// Effective worker count: `requested`, capped by CONGRUENT_TENSORS_THREADS.
unsigned effective_threads(unsigned requested);

}  // namespace congruent::cli
