#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "congruent/cli.hpp"

namespace {

void add_inputs(CLI::App* cmd, congruent::cli::JobSpec& job) {
  cmd->add_option("--model", job.model, "Model description (JSON)");
  cmd->add_option("--kernel", job.kernel, "Markov kernel (JSON)");
  cmd->add_option("--statistic", job.statistic, "Statistic (JSON)");
  cmd->add_option("--measure", job.measure, "Measure (JSON)");
  cmd->add_option("--oracle", job.oracle, "builtin:<name> or oracle description (JSON)");
}

void add_options(CLI::App* cmd, congruent::cli::JobSpec& job) {
  cmd->add_option("--n", job.degree, "Tensor degree");
  cmd->add_option("--xi", job.xi, "Parameter point")->delimiter(',');
  cmd->add_option("--space", job.space, "M (finite measures) or P (probability measures)");
  cmd->add_option("--regularity", job.regularity, "Regularity r of builtin oracles, e.g. 1/2");
  cmd->add_option("--lambda", job.lambda_grid, "Total-mass grid")->delimiter(',');
  cmd->add_option("--probe-size", job.probe_size, "Index set size for center probes (0: n+2)");
  cmd->add_option("--points", job.verification_points, "Verification sample size");
  cmd->add_option("--trials", job.trials, "Random kernels for verify");
  cmd->add_option("--seed", job.seed, "Random seed");
  cmd->add_option("--tolerance", job.tolerance, "Verification tolerance");
  cmd->add_option("--threads", job.threads, "Worker threads");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Congruent tensor calculus on finite sample spaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(congruent::cli::library_version()));

  congruent::cli::JobSpec job;
  std::string output;
  app.add_option("-o,--output", output, "Write the report here instead of stdout");

  const std::pair<const char*, const char*> commands[] = {
      {"tensor", "Canonical tensor of a parametrized model"},
      {"check-congruence", "Support criterion for a kernel and statistic"},
      {"pushforward", "Push a measure or model through a kernel"},
      {"decompose", "Canonical expansion of a congruent family"},
      {"verify", "Invariance of a family under random congruent kernels"},
  };
  for (const auto& [name, help] : commands) {
    auto* cmd = app.add_subcommand(name, help);
    add_inputs(cmd, job);
    add_options(cmd, job);
    cmd->fallthrough();
    cmd->callback([&job, name = std::string(name)] { job.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : congruent::cli::kExitSchema;
  }

  const auto result = congruent::cli::run(job);
  if (output.empty()) {
    std::cout << result.report;
  } else {
    std::ofstream out(output, std::ios::binary);
    out << result.report;
    if (!out) {
      std::cerr << "cannot write " << output << "\n";
      return congruent::cli::kExitSchema;
    }
  }
  return result.exit_code;
}
