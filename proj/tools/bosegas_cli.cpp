#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "bosegas/errors.hpp"

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> cutoff_factor;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--config", o.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--seed", o.seed, "RNG seed");
  sub->add_option("--threads", o.threads, "OpenMP threads");
  sub->add_option("--cutoff-factor", o.cutoff_factor, "ambient cutoff in units of L/R");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace bosegas;
  CLI::App app{"Renormalized two-body kernels and exact diagonalization for the dilute Bose gas"};
  app.require_subcommand(1);
  Options o;
  const char* names[][2] = {
      {"scatter", "zero-energy scattering solution and scattering length"},
      {"twobody", "renormalized kernel bounds and scaling"},
      {"ed", "exact diagonalization of the truncated Hamiltonian"},
      {"verify", "many-body lower-bound gap on ground and random states"},
      {"scan", "a priori exponent fits over N"},
  };
  for (auto& n : names) add_common(app.add_subcommand(n[0], n[1]), o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return app::kConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  app::ExperimentConfig cfg;
  try {
    cfg = app::load_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (o.threads) cfg.threads = *o.threads;
    if (o.cutoff_factor) cfg.cutoff_factor = *o.cutoff_factor;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return app::kConfig;
  }

  const app::CommandResult r = app::run_command(command, cfg, o.out, std::cerr);
  if (!r.content_hash.empty()) std::cout << r.content_hash << "\n";
  return r.exit_code;
}
