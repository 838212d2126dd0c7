#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "dclife/model.hpp"
#include "dclife/sweep.hpp"

namespace {

using dclife::sweep::Command;
using dclife::sweep::OutputFormat;
using dclife::sweep::RunSpec;

std::pair<int, int> parse_d_range(const std::string& text) {
  const auto sep = text.find("..");
  if (sep == std::string::npos) {
    throw dclife::sweep::InvalidSpec("--d-range expects LO..HI");
  }
  try {
    const int lo = std::stoi(text.substr(0, sep));
    const int hi = std::stoi(text.substr(sep + 2));
    return {lo, hi};
  } catch (const std::exception&) {
    throw dclife::sweep::InvalidSpec("--d-range expects integers LO..HI");
  }
}

int run(const RunSpec& spec) {
  if (spec.command == Command::stationary) {
    const auto table = dclife::sweep::run_stationary(spec);
    dclife::sweep::emit_stationary(table, spec.format, spec.out);
    return 0;
  }
  const auto table = dclife::sweep::run_sweep(spec);
  dclife::sweep::emit(table, spec.format, spec.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"File lifetime in a network of failing, rejoining data centers"};
  app.fallthrough();
  app.set_config("--config", "", "Key-value file with the same option names");
  app.require_subcommand(1);

  double lambda = 1.0;
  double beta = 0.0;
  double mu = 0.0;
  long long d = 1;
  std::string d_range;
  double tol = 1e-8;
  std::size_t samples = 0;
  std::uint64_t seed = 42;
  std::string format = "csv";
  std::string out;

  app.add_option("--lambda", lambda, "Failure rate per data center (> 0)");
  app.add_option("--beta", beta, "Arrival rate of new data centers (>= 0)");
  app.add_option("--mu", mu, "Per-copy replication rate (>= 0)");
  app.add_option("--d", d, "Replication threshold (>= 1)");
  app.add_option("--d-range", d_range, "Inclusive sweep range LO..HI");
  app.add_option("--tol", tol, "Relative tolerance for analytic methods");
  app.add_option("--samples", samples,
                 "Simulation replications (0 = no simulation)");
  app.add_option("--seed", seed, "Simulation seed");
  app.add_option("--format", format, "Output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", out, "Output path (default: stdout)");

  auto* cmd_stationary =
      app.add_subcommand("stationary", "Stationary law of the center count");
  auto* cmd_approx =
      app.add_subcommand("approx", "Mean lifetime, corrected-rate chain");
  auto* cmd_qbd =
      app.add_subcommand("qbd", "Mean lifetime, two-dimensional chain");
  auto* cmd_simulate =
      app.add_subcommand("simulate", "Mean lifetime, stochastic simulation");
  auto* cmd_sweep =
      app.add_subcommand("sweep", "All methods across a range of d");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    RunSpec spec;
    if (cmd_stationary->parsed()) spec.command = Command::stationary;
    if (cmd_approx->parsed()) spec.command = Command::approx;
    if (cmd_qbd->parsed()) spec.command = Command::qbd;
    if (cmd_simulate->parsed()) spec.command = Command::simulate;
    if (cmd_sweep->parsed()) spec.command = Command::sweep;

    if (!d_range.empty()) {
      if (spec.command == Command::stationary) {
        throw dclife::sweep::InvalidSpec(
            "--d-range does not apply to stationary");
      }
      spec.d_range = parse_d_range(d_range);
    }
    spec.params = dclife::validate_params(
        lambda, beta, mu, spec.d_range ? spec.d_range->first : d);
    spec.tol = tol;
    spec.samples = samples;
    spec.seed = seed;
    spec.format =
        format == "json" ? OutputFormat::json : OutputFormat::csv;
    spec.out = out;
    return run(spec);
  } catch (const dclife::sweep::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
