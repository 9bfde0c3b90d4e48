#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bosegas/potential.hpp"
#include "bosegas/renorm_check.hpp"

namespace bosegas::app {

struct PotentialSpec {
  std::string model = "soft_sphere";  // soft_sphere | shell | tabulated
  double v0 = 50.0;
  double radius = 0.2;
  double r_inner = 0.1;
  std::string table;  // tabulated: two-column file, relative to the config file

  RadialPotential build() const;
};

struct Tolerances {
  double lanczos = 1e-9;
  double gap = 1e-9;
  int ode_steps = 10000;
  double integral = 1e-8;
  double exponent = 0.3;
};

struct Limits {
  std::uint64_t max_modes = 200000;
  std::uint64_t max_dim = 2000000;
};

/// One experiment. Every key of the JSON file maps to a field here; unknown
/// keys are rejected.
struct ExperimentConfig {
  PotentialSpec potential;
  double kappa = 0.04;
  double epsilon = 0.05;
  std::optional<double> alpha, beta, delta;
  bool exploratory = false;
  std::vector<long> N{5};
  int modes = 13;                     // Fock mode count (odd)
  std::optional<double> mode_cutoff;  // alternative to `modes`: all |p| <= cutoff
  double cutoff_factor = 4.0;
  std::string kernel = "resolvent";   // twobody: resolvent | truncated
  std::vector<long> doubling_N{4};    // twobody cutoff-doubling grid
  double eta_table_cutoff = 18.9;     // twobody: |p| range of tabulated eta rows
  int random_states = 100;
  std::uint64_t seed = 20240611;
  int threads = 0;
  bool dump_states = false;
  Tolerances tol;
  Limits limits;
  std::filesystem::path base_dir;  // directory of the config file

  CheckConfig check_config(long N) const;
  ModeSet fock_modes() const;
  /// Theorem-range checks for ed / verify / scan.
  void validate_many_body() const;
  /// kappa in [0,1), alpha in [0, 1-kappa], potential valid.
  void validate_basic() const;

  nlohmann::json to_json() const;
};

ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace bosegas::app
