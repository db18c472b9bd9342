#include "congruent/cli.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "congruent/error.hpp"
#include "congruent/partition.hpp"

#ifndef CONGRUENT_TENSORS_VERSION
#define CONGRUENT_TENSORS_VERSION "0.0.0"
#endif

namespace congruent::cli {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_error(const std::string& what) { throw Error(Errc::kSchema, what); }

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) schema_error(std::string("missing field \"") + key + "\"");
  return doc.at(key);
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) schema_error(what + " must be a number");
  return v.get<double>();
}

std::size_t as_size(const json& v, const std::string& what) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) schema_error(what + " must be a nonnegative integer");
  return v.get<std::size_t>();
}

std::vector<double> as_vector(const json& v, const std::string& what) {
  if (!v.is_array()) schema_error(what + " must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(as_number(x, what));
  return out;
}

Eigen::VectorXd as_eigen_vector(const json& v, const std::string& what) {
  const auto values = as_vector(v, what);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Eigen::MatrixXd as_matrix(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) schema_error(what + " must be a nonempty array of rows");
  const auto first = as_vector(v.front(), what);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(first.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto row = as_vector(v[i], what);
    if (row.size() != first.size()) schema_error(what + " rows differ in length");
    for (std::size_t j = 0; j < row.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
  }
  return m;
}

Rational as_rational(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  schema_error("regularity must be an integer or a string such as \"1/2\"");
}

Partition as_partition(const json& v) {
  if (!v.is_array()) schema_error("partition must be an array of blocks");
  std::vector<std::vector<int>> blocks;
  for (const auto& b : v) {
    if (!b.is_array()) schema_error("partition block must be an array");
    std::vector<int> block;
    for (const auto& e : b) {
      if (!e.is_number_integer() || e.get<int>() < 1) schema_error("partition elements are positive integers");
      block.push_back(e.get<int>() - 1);
    }
    blocks.push_back(std::move(block));
  }
  try {
    return Partition(blocks);
  } catch (const Error& e) {
    schema_error(e.what());
  }
}

ojson partition_json(const Partition& p) {
  ojson blocks = ojson::array();
  for (const auto& b : p.blocks()) {
    ojson block = ojson::array();
    for (int k : b) block.push_back(k + 1);
    blocks.push_back(block);
  }
  return blocks;
}

std::function<double(double)> as_coefficient(const json& v) {
  if (v.is_number()) {
    const double c = v.get<double>();
    return [c](double) { return c; };
  }
  if (v.is_object() && v.contains("power")) {
    const auto& p = v.at("power");
    const double scale = as_number(require(p, "scale"), "power.scale");
    const double exponent = as_number(require(p, "exponent"), "power.exponent");
    return [scale, exponent](double lambda) { return scale * std::pow(lambda, exponent); };
  }
  if (v.is_object() && v.contains("table")) {
    const auto& t = v.at("table");
    const auto lambdas = as_vector(require(t, "lambda"), "table.lambda");
    const auto values = as_vector(require(t, "values"), "table.values");
    if (lambdas.empty() || lambdas.size() != values.size()) {
      schema_error("table.lambda and table.values must be nonempty and of equal length");
    }
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
      if (!(lambdas[k] > 0.0) || (k > 0 && !(lambdas[k] > lambdas[k - 1]))) {
        schema_error("table.lambda must be positive and strictly increasing");
      }
    }
    // Piecewise linear, constant beyond the ends.
    return [lambdas, values](double lambda) {
      if (lambda <= lambdas.front()) return values.front();
      if (lambda >= lambdas.back()) return values.back();
      const auto hi = static_cast<std::size_t>(std::upper_bound(lambdas.begin(), lambdas.end(), lambda) - lambdas.begin());
      const std::size_t lo = hi - 1;
      const double t = (lambda - lambdas[lo]) / (lambdas[hi] - lambdas[lo]);
      return values[lo] + t * (values[hi] - values[lo]);
    };
  }
  schema_error("coefficient must be a number, {\"power\":...} or {\"table\":...}");
}

TensorFieldOracle builtin_oracle(const std::string& name, std::optional<int> degree, Rational r) {
  auto fixed = [&](int n) {
    if (degree && *degree != n) {
      schema_error("builtin:" + name + " has degree " + std::to_string(n) + ", not " + std::to_string(*degree));
    }
    return n;
  };
  auto free_degree = [&] {
    if (!degree) schema_error("builtin:" + name + " needs a degree");
    if (*degree < 1) schema_error("degree must be at least 1");
    return *degree;
  };
  if (name == "score") return partition_tensor(Partition::whole(fixed(1)), r);
  if (name == "fisher") return partition_tensor(Partition::whole(fixed(2)), r);
  if (name == "amari-chentsov") return partition_tensor(Partition::whole(fixed(3)), r);
  if (name == "canonical") return partition_tensor(Partition::whole(free_degree()), r);
  if (name == "zero") {
    return TensorFieldOracle(free_degree(), r, [](const RMeasure&, std::span<const RMeasure>) { return 0.0; });
  }
  schema_error("unknown builtin oracle \"" + name + "\"");
}

json read_json_file(const std::string& path, std::string& raw) {
  std::ifstream in(path, std::ios::binary);
  if (!in) schema_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  raw = buf.str();
  try {
    return json::parse(raw);
  } catch (const json::parse_error& e) {
    schema_error(path + ": " + e.what());
  }
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int k = 0; k < length; ++k) hex += fmt::format("{:02x}", digest[k]);
  return hex;
}

void write_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  out += fmt::format("{:.17g}", x);
}

void write(std::string& out, const ojson& v, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (v.type()) {
    case ojson::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : v.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + ojson(key).dump() + ": ";
        write(out, value, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case ojson::value_t::array: {
      const bool flat = std::all_of(v.begin(), v.end(), [](const ojson& e) { return e.is_primitive(); });
      if (v.empty()) {
        out += "[]";
      } else if (flat) {
        out += "[";
        for (std::size_t k = 0; k < v.size(); ++k) {
          if (k) out += ", ";
          write(out, v[k], indent);
        }
        out += "]";
      } else {
        out += "[\n";
        for (std::size_t k = 0; k < v.size(); ++k) {
          if (k) out += ",\n";
          out += pad;
          write(out, v[k], indent + 2);
        }
        out += "\n" + close + "]";
      }
      return;
    }
    case ojson::value_t::number_float:
      write_number(out, v.get<double>());
      return;
    default:
      out += v.dump();
  }
}

ojson vector_json(std::span<const double> values) { return ojson(std::vector<double>(values.begin(), values.end())); }

ojson vector_json(const Eigen::VectorXd& values) {
  return ojson(std::vector<double>(values.data(), values.data() + values.size()));
}

ojson options_json(const JobSpec& job) {
  ojson o;
  auto opt = [&](const char* key, const std::optional<std::string>& v) {
    o[key] = v ? ojson(*v) : ojson(nullptr);
  };
  opt("model", job.model);
  opt("kernel", job.kernel);
  opt("statistic", job.statistic);
  opt("measure", job.measure);
  opt("oracle", job.oracle);
  o["n"] = job.degree ? ojson(*job.degree) : ojson(nullptr);
  o["xi"] = job.xi;
  o["space"] = job.space;
  o["regularity"] = job.regularity;
  o["lambda_grid"] = job.lambda_grid;
  o["probe_size"] = job.probe_size;
  o["verification_points"] = job.verification_points;
  o["trials"] = job.trials;
  o["seed"] = job.seed;
  o["tolerance"] = job.tolerance;
  o["threads"] = job.threads;
  return o;
}

// Everything read from disk, plus the digest input.
struct Inputs {
  std::string digest_material;

  json load(const std::string& label, const std::string& path) {
    std::string raw;
    auto doc = read_json_file(path, raw);
    digest_material += label + '\0' + raw + '\0';
    return doc;
  }
};

void validate_job(const JobSpec& job) {
  static const std::vector<std::string> commands{"tensor", "check-congruence", "pushforward", "decompose", "verify"};
  if (std::find(commands.begin(), commands.end(), job.command) == commands.end()) {
    schema_error("unknown command \"" + job.command + "\"");
  }
  if (!(job.tolerance > 0.0) || !std::isfinite(job.tolerance)) schema_error("tolerance must be positive");
  if (job.lambda_grid.empty()) schema_error("lambda grid is empty");
  for (std::size_t k = 0; k < job.lambda_grid.size(); ++k) {
    if (!(job.lambda_grid[k] > 0.0) || (k > 0 && !(job.lambda_grid[k] > job.lambda_grid[k - 1]))) {
      schema_error("lambda grid must be positive and strictly increasing");
    }
  }
  if (job.space != "M" && job.space != "P") schema_error("space must be M or P");
  if (job.degree && *job.degree < 1) schema_error("n must be at least 1");
  if (job.threads == 0) schema_error("threads must be at least 1");
}

ParametrizedModel load_model(const JobSpec& job, Inputs& inputs) {
  if (!job.model) schema_error(job.command + " needs --model");
  return parse_model(inputs.load("model", *job.model));
}

Eigen::VectorXd load_xi(const JobSpec& job, const ParametrizedModel& model) {
  if (job.xi.size() != model.param_dim()) {
    schema_error("xi has " + std::to_string(job.xi.size()) + " entries, model has " +
                 std::to_string(model.param_dim()) + " parameters");
  }
  return Eigen::Map<const Eigen::VectorXd>(job.xi.data(), static_cast<Eigen::Index>(job.xi.size()));
}

ojson tensor_block(const ParametrizedModel& model, const Eigen::VectorXd& xi, int n) {
  ojson out;
  const auto d = model.param_dim();
  out["shape"] = std::vector<std::size_t>(static_cast<std::size_t>(n), d);
  out["components"] = model_tensor_components(model, xi, n);
  return out;
}

// A parsed job ready to compute; parsing failures are schema errors.
struct Prepared {
  std::function<ojson(int& exit_code)> compute;
};

Prepared prepare_tensor(const JobSpec& job, Inputs& inputs) {
  auto model = load_model(job, inputs);
  const auto xi = load_xi(job, model);
  const int n = job.degree.value_or(2);
  return {[model, xi, n](int&) {
    ojson r;
    r["model"] = model.name();
    r["n"] = n;
    r["xi"] = vector_json(xi);
    r["point"] = vector_json(model.evaluate(xi));
    r["tensor"] = tensor_block(model, xi, n);
    return r;
  }};
}

Prepared prepare_check(const JobSpec& job, Inputs& inputs) {
  if (!job.kernel) schema_error("check-congruence needs --kernel");
  const auto kernel_doc = inputs.load("kernel", *job.kernel);
  auto kernel = parse_kernel(kernel_doc);
  std::optional<Statistic> kappa;
  if (job.statistic) {
    kappa = parse_statistic(inputs.load("statistic", *job.statistic), kernel.source_size());
  } else if (kernel_doc.contains("statistic")) {
    kappa = parse_statistic(kernel_doc.at("statistic"), kernel.source_size());
  } else {
    schema_error("check-congruence needs a statistic (--statistic or a \"statistic\" field)");
  }
  if (kappa->source_size() != kernel.target_size() || kappa->target_size() != kernel.source_size()) {
    schema_error("statistic must map the kernel's target index set onto its source index set");
  }
  return {[kernel, kappa = *kappa](int& exit_code) {
    ojson r;
    const bool congruent = is_congruent(kernel, kappa);
    ojson violations = ojson::array();
    for (std::size_t i = 0; i < kernel.source_size(); ++i) {
      for (std::size_t ip = 0; ip < kernel.target_size(); ++ip) {
        if (kernel(i, ip) != 0.0 && kappa[ip] != i) {
          violations.push_back({{"source", i}, {"target", ip}, {"weight", kernel(i, ip)}});
        }
      }
    }
    r["source_size"] = kernel.source_size();
    r["target_size"] = kernel.target_size();
    r["congruent"] = congruent;
    r["violations"] = violations;
    if (!congruent) exit_code = kExitVerification;
    return r;
  }};
}

Prepared prepare_pushforward(const JobSpec& job, Inputs& inputs) {
  if (!job.kernel) schema_error("pushforward needs --kernel");
  auto kernel = parse_kernel(inputs.load("kernel", *job.kernel));
  if (job.measure) {
    auto mu = parse_measure(inputs.load("measure", *job.measure));
    if (mu.size() != kernel.source_size()) schema_error("measure size differs from the kernel's source size");
    return {[kernel, mu](int&) {
      ojson r;
      const auto pushed = pushforward(kernel, mu);
      r["measure"] = vector_json(mu.coeffs());
      r["pushforward"] = vector_json(pushed.coeffs());
      r["mass"] = mu.total_mass();
      r["pushforward_mass"] = pushed.total_mass();
      return r;
    }};
  }
  if (job.model) {
    auto model = load_model(job, inputs);
    if (model.index_size() != kernel.source_size()) schema_error("model size differs from the kernel's source size");
    const auto xi = load_xi(job, model);
    const int n = job.degree.value_or(2);
    return {[kernel, model, xi, n](int&) {
      ojson r;
      const auto pushed = pushforward_model(model, kernel);
      r["model"] = model.name();
      r["n"] = n;
      r["xi"] = vector_json(xi);
      r["point"] = vector_json(model.evaluate(xi));
      r["pushforward_point"] = vector_json(pushed.evaluate(xi));
      r["tensor"] = tensor_block(model, xi, n);
      r["pushforward_tensor"] = tensor_block(pushed, xi, n);
      return r;
    }};
  }
  schema_error("pushforward needs --measure or --model");
}

DecomposeOptions decompose_options(const JobSpec& job) {
  DecomposeOptions opts;
  opts.lambda_grid = job.lambda_grid;
  opts.probe_size = job.probe_size;
  opts.verification_points = job.verification_points;
  opts.seed = job.seed;
  opts.tolerance = job.tolerance;
  opts.max_threads = effective_threads(job.threads);
  return opts;
}

TensorFieldOracle load_oracle(const JobSpec& job, Inputs& inputs) {
  if (!job.oracle) schema_error(job.command + " needs --oracle");
  const Rational r = parse_rational(job.regularity);
  if (job.oracle->rfind("builtin:", 0) == 0) {
    inputs.digest_material += "oracle" + std::string(1, '\0') + *job.oracle + '\0';
    return resolve_oracle(*job.oracle, job.degree, r);
  }
  auto oracle = parse_oracle(inputs.load("oracle", *job.oracle));
  if (job.degree && *job.degree != oracle.degree()) schema_error("--n differs from the oracle's degree");
  return oracle;
}

Prepared prepare_decompose(const JobSpec& job, Inputs& inputs) {
  auto oracle = load_oracle(job, inputs);
  if (oracle.degree() < 1) schema_error("decomposition needs degree at least 1");
  const auto opts = decompose_options(job);
  const bool on_p = job.space == "P";
  return {[oracle, opts, on_p](int& exit_code) {
    const auto d = on_p ? decompose_on_P(oracle, opts) : decompose_on_M(oracle, opts);
    ojson r;
    r["space"] = on_p ? "P" : "M";
    r["degree"] = d.degree;
    r["regularity"] = to_string(d.regularity);
    r["lambda_grid"] = d.lambda_grid;
    ojson terms = ojson::array();
    for (std::size_t p = 0; p < d.partitions.size(); ++p) {
      ojson t;
      t["partition"] = partition_json(d.partitions[p]);
      if (on_p) {
        t["coefficient"] = d.coefficients[p][0];
      } else {
        t["coefficients"] = d.coefficients[p];
      }
      terms.push_back(t);
    }
    r["terms"] = terms;
    if (on_p) {
      ojson absorbed = ojson::array();
      for (std::size_t p = 0; p < d.absorbed.size(); ++p) {
        absorbed.push_back({{"partition", partition_json(d.absorbed[p])}, {"coefficient", d.absorbed_coefficients[p]}});
      }
      r["absorbed"] = absorbed;
    }
    r["probe_size"] = d.probe_size;
    r["verification_points"] = d.verification_points;
    r["residual"] = d.residual;
    r["representative_spread"] = d.representative_spread;
    r["tolerance"] = d.tolerance;
    r["non_congruent"] = d.non_congruent;
    if (d.non_congruent) exit_code = kExitVerification;
    return r;
  }};
}

Prepared prepare_verify(const JobSpec& job, Inputs& inputs) {
  auto oracle = load_oracle(job, inputs);
  const auto trials = job.trials;
  const auto seed = job.seed;
  const double tol = job.tolerance;
  return {[oracle, trials, seed, tol](int& exit_code) {
    KernelGenerator gen(seed);
    auto& rng = gen.engine();
    std::uniform_int_distribution<std::size_t> source_dist(1, 4);
    std::uniform_int_distribution<std::size_t> fiber_dist(1, 3);
    std::uniform_real_distribution<double> mass_dist(0.25, 1.0);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const Rational r = oracle.regularity();
    double max_abs = 0.0;
    double max_rel = 0.0;
    std::size_t failures = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t s = source_dist(rng);
      std::vector<std::size_t> fibers(s);
      for (auto& f : fibers) f = fiber_dist(rng);
      auto [kernel, kappa] = gen.congruent(fibers);
      std::vector<double> mu(s);
      for (auto& x : mu) x = mass_dist(rng);
      const auto base = power_map(RMeasure(mu), r);
      std::vector<RMeasure> tangents;
      for (int k = 0; k < oracle.degree(); ++k) {
        std::vector<double> v(s);
        for (auto& x : v) x = unit(rng);
        tangents.emplace_back(std::move(v), r);
      }
      const double direct = oracle(base, tangents);
      const double pulled = pullback_markov(kernel, oracle)(base, tangents);
      const double diff = std::abs(pulled - direct);
      const double rel = diff / std::max(1.0, std::abs(direct));
      max_abs = std::max(max_abs, diff);
      max_rel = std::max(max_rel, rel);
      if (!(rel <= tol)) ++failures;
    }
    ojson r_out;
    r_out["degree"] = oracle.degree();
    r_out["regularity"] = to_string(r);
    r_out["trials"] = trials;
    r_out["max_abs_difference"] = max_abs;
    r_out["max_relative_difference"] = max_rel;
    r_out["failures"] = failures;
    r_out["tolerance"] = tol;
    r_out["invariant"] = failures == 0;
    if (failures) exit_code = kExitVerification;
    return r_out;
  }};
}

}  // namespace

std::string_view library_version() { return CONGRUENT_TENSORS_VERSION; }

ParametrizedModel parse_model(const json& doc) {
  const auto& type = require(doc, "type");
  if (!type.is_string()) schema_error("model type must be a string");
  const auto name = type.get<std::string>();
  try {
    if (name == "bernoulli") return zoo::bernoulli();
    if (name == "simplex") return zoo::categorical_simplex(as_size(require(doc, "size"), "size"));
    if (name == "expfam") {
      auto features = as_matrix(require(doc, "sufficient_statistics"), "sufficient_statistics");
      if (doc.contains("size") && as_size(doc.at("size"), "size") != static_cast<std::size_t>(features.rows())) {
        schema_error("size differs from the number of sufficient_statistics rows");
      }
      if (doc.contains("dimension") &&
          as_size(doc.at("dimension"), "dimension") != static_cast<std::size_t>(features.cols())) {
        schema_error("dimension differs from the number of sufficient_statistics columns");
      }
      const double bound = doc.contains("bound") ? as_number(doc.at("bound"), "bound") : 10.0;
      const bool normalized = !doc.contains("normalized") || doc.at("normalized").get<bool>();
      return normalized ? zoo::exponential_family(features, bound)
                        : zoo::unnormalized_exponential_family(features, bound);
    }
    if (name == "table") {
      auto base = as_eigen_vector(require(doc, "base"), "base");
      auto directions = as_matrix(require(doc, "directions"), "directions");
      ParameterBox box{as_eigen_vector(require(doc, "lower"), "lower"), as_eigen_vector(require(doc, "upper"), "upper")};
      if (box.lower.size() != box.upper.size()) schema_error("lower and upper differ in length");
      return zoo::affine(base, directions, box);
    }
  } catch (const json::exception& e) {
    schema_error(e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::kSchema) throw;
    schema_error(e.what());
  }
  schema_error("unknown model type \"" + name + "\"");
}

MarkovKernel parse_kernel(const json& doc) {
  const auto& rows = require(doc, "rows");
  if (!rows.is_array() || rows.empty()) schema_error("rows must be a nonempty array");
  std::vector<std::vector<double>> parsed;
  for (const auto& row : rows) parsed.push_back(as_vector(row, "kernel row"));
  try {
    return MarkovKernel::from_rows(parsed);
  } catch (const Error& e) {
    schema_error(e.what());
  }
}

Statistic parse_statistic(const json& doc, std::optional<std::size_t> default_target) {
  const json& map = doc.is_array() ? doc : require(doc, "map");
  if (!map.is_array() || map.empty()) schema_error("statistic map must be a nonempty array");
  std::vector<std::size_t> values;
  for (const auto& v : map) values.push_back(as_size(v, "statistic entry"));
  std::size_t target = *std::max_element(values.begin(), values.end()) + 1;
  if (doc.is_object() && doc.contains("target_size")) {
    target = as_size(doc.at("target_size"), "target_size");
  } else if (default_target) {
    target = *default_target;
  }
  try {
    return Statistic(target, std::move(values));
  } catch (const Error& e) {
    schema_error(e.what());
  }
}

SignedMeasure parse_measure(const json& doc) {
  const json& coeffs = doc.is_array() ? doc : require(doc, "coefficients");
  try {
    return SignedMeasure(as_vector(coeffs, "coefficients"));
  } catch (const Error& e) {
    if (e.code() == Errc::kSchema) throw;
    schema_error(e.what());
  }
}

TensorFieldOracle parse_oracle(const json& doc) {
  const auto& type = require(doc, "type");
  if (!type.is_string()) schema_error("oracle type must be a string");
  const Rational r = doc.contains("regularity") ? as_rational(doc.at("regularity")) : Rational(1);
  std::optional<int> degree;
  if (doc.contains("degree")) degree = static_cast<int>(as_size(doc.at("degree"), "degree"));
  try {
    if (type == "builtin") {
      const auto& name = require(doc, "name");
      if (!name.is_string()) schema_error("builtin name must be a string");
      return builtin_oracle(name.get<std::string>(), degree, r);
    }
    if (type == "linear-combination") {
      if (!degree || *degree < 1) schema_error("linear-combination needs a positive degree");
      const auto& terms = require(doc, "terms");
      if (!terms.is_array()) schema_error("terms must be an array");
      std::vector<ExpansionTerm> parsed;
      for (const auto& t : terms) {
        auto p = as_partition(require(t, "partition"));
        if (p.degree() != *degree) schema_error("term partition " + p.to_string() + " has the wrong degree");
        parsed.push_back({std::move(p), as_coefficient(require(t, "coefficient"))});
      }
      return synthesize(*degree, r, parsed);
    }
  } catch (const json::exception& e) {
    schema_error(e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::kSchema) throw;
    schema_error(e.what());
  }
  schema_error("unknown oracle type \"" + type.get<std::string>() + "\"");
}

TensorFieldOracle resolve_oracle(const std::string& reference, std::optional<int> degree, Rational regularity) {
  constexpr std::string_view prefix = "builtin:";
  if (reference.rfind(prefix, 0) == 0) {
    try {
      return builtin_oracle(reference.substr(prefix.size()), degree, regularity);
    } catch (const Error& e) {
      if (e.code() == Errc::kSchema) throw;
      schema_error(e.what());
    }
  }
  std::string raw;
  auto oracle = parse_oracle(read_json_file(reference, raw));
  if (degree && *degree != oracle.degree()) schema_error("degree differs from the oracle's degree");
  return oracle;
}

std::string serialize(const ojson& doc) {
  std::string out;
  write(out, doc, 0);
  out += "\n";
  return out;
}

unsigned effective_threads(unsigned requested) {
  unsigned threads = std::max(1u, requested);
  if (const char* env = std::getenv("CONGRUENT_TENSORS_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap >= 1) threads = std::min<unsigned>(threads, static_cast<unsigned>(cap));
  }
  return threads;
}

JobResult run(const JobSpec& job) {
  ojson report;
  report["status"] = "ok";
  report["command"] = job.command;
  report["version"] = std::string(library_version());
  report["inputs_digest"] = nullptr;
  report["options"] = options_json(job);
  report["results"] = nullptr;

  JobResult result;
  auto fail = [&](int code, const char* status, const std::string& message) {
    result.exit_code = code;
    report["status"] = status;
    report["error"] = message;
  };

  Inputs inputs;
  Prepared prepared;
  try {
    validate_job(job);
    if (job.command == "tensor") {
      prepared = prepare_tensor(job, inputs);
    } else if (job.command == "check-congruence") {
      prepared = prepare_check(job, inputs);
    } else if (job.command == "pushforward") {
      prepared = prepare_pushforward(job, inputs);
    } else if (job.command == "decompose") {
      prepared = prepare_decompose(job, inputs);
    } else {
      prepared = prepare_verify(job, inputs);
    }
  } catch (const std::exception& e) {
    fail(kExitSchema, "schema-error", e.what());
  }
  report["inputs_digest"] = sha256_hex(inputs.digest_material);

  if (result.exit_code == kExitOk) {
    try {
      int exit_code = kExitOk;
      report["results"] = prepared.compute(exit_code);
      if (exit_code == kExitVerification) {
        result.exit_code = exit_code;
        report["status"] = "verification-failed";
      }
    } catch (const Error& e) {
      fail(e.code() == Errc::kSchema ? kExitSchema : kExitNumeric,
           e.code() == Errc::kSchema ? "schema-error" : "numeric-error", e.what());
    } catch (const std::exception& e) {
      fail(kExitNumeric, "numeric-error", e.what());
    }
  }
  result.report = serialize(report);
  return result;
}

}  // namespace congruent::cli
