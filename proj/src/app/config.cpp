#include "app/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "bosegas/errors.hpp"

namespace bosegas::app {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) {
      std::string list;
      for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
      throw ConfigError("unknown key '" + key + "' in " + where + " (allowed: " + list + ")");
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

template <class T>
void read_opt(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return;
  T v{};
  read(j, key, v, where);
  out = v;
}

void read_grid(const json& j, const char* key, std::vector<long>& out) {
  if (!j.contains(key)) return;
  const json& v = j.at(key);
  if (v.is_number_integer()) {
    out = {v.get<long>()};
  } else if (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const json& x) {
               return x.is_number_integer();
             })) {
    out = v.get<std::vector<long>>();
  } else {
    throw ConfigError("key '" + std::string(key) + "' must be an integer or a non-empty integer list");
  }
  for (long n : out) {
    if (n < 1) throw ConfigError("particle numbers in '" + std::string(key) + "' must be >= 1");
  }
}

}  // namespace

RadialPotential PotentialSpec::build() const {
  if (model == "soft_sphere") return RadialPotential::soft_sphere(v0, radius);
  if (model == "shell") return RadialPotential::shell(v0, r_inner, radius);
  if (model == "tabulated") {
    if (table.empty()) throw ConfigError("tabulated potential needs 'table'");
    return RadialPotential::load_table(table);
  }
  throw ConfigError("unknown potential model '" + model + "' (soft_sphere, shell, tabulated)");
}

CheckConfig ExperimentConfig::check_config(long n) const {
  CheckConfig c = CheckConfig::defaults(n, kappa, epsilon);
  if (alpha) c.alpha = *alpha;
  if (beta) c.beta = *beta;
  if (delta) {
    c.delta = *delta;
  } else {
    c.delta = 0.5 * (0.5 * kappa + c.alpha);
  }
  c.exploratory = exploratory;
  return c;
}

ModeSet ExperimentConfig::fock_modes() const {
  if (mode_cutoff) return build_mode_set(*mode_cutoff, limits.max_modes);
  return build_mode_set_count(modes);
}

void ExperimentConfig::validate_basic() const {
  if (!(kappa >= 0.0 && kappa < 1.0)) throw ConfigError("kappa must lie in [0, 1)");
  const CheckConfig c = check_config(N.front());
  if (!(c.alpha >= 0.0 && (exploratory || c.alpha <= 1.0 - kappa))) {
    throw ConfigError("alpha must lie in [0, 1-kappa]");
  }
  if (!(cutoff_factor > 0.0)) throw ConfigError("cutoff_factor must be > 0");
  if (random_states < 0) throw ConfigError("random_states must be >= 0");
  if (tol.ode_steps < 2) throw ConfigError("tolerances.ode_steps must be >= 2");
  if (!(tol.lanczos > 0.0) || !(tol.gap > 0.0) || !(tol.integral > 0.0)) {
    throw ConfigError("tolerances must be > 0");
  }
  potential.build();
}

void ExperimentConfig::validate_many_body() const {
  validate_basic();
  for (long n : N) check_config(n).validate();
}

json ExperimentConfig::to_json() const {
  json p = {{"model", potential.model}, {"v0", potential.v0}, {"radius", potential.radius}};
  if (potential.model == "shell") p["r_inner"] = potential.r_inner;
  if (potential.model == "tabulated") p["table"] = potential.table;
  json j = {{"potential", p},
            {"kappa", kappa},
            {"epsilon", epsilon},
            {"alpha", alpha ? json(*alpha) : json(nullptr)},
            {"beta", beta ? json(*beta) : json(nullptr)},
            {"delta", delta ? json(*delta) : json(nullptr)},
            {"exploratory", exploratory},
            {"N", N},
            {"modes", modes},
            {"mode_cutoff", mode_cutoff ? json(*mode_cutoff) : json(nullptr)},
            {"cutoff_factor", cutoff_factor},
            {"kernel", kernel},
            {"doubling_N", doubling_N},
            {"eta_table_cutoff", eta_table_cutoff},
            {"random_states", random_states},
            {"seed", seed},
            {"threads", threads},
            {"dump_states", dump_states},
            {"tolerances",
             {{"lanczos", tol.lanczos},
              {"gap", tol.gap},
              {"ode_steps", tol.ode_steps},
              {"integral", tol.integral},
              {"exponent", tol.exponent}}},
            {"limits", {{"max_modes", limits.max_modes}, {"max_dim", limits.max_dim}}}};
  return j;
}

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  c.base_dir = base_dir;
  reject_unknown(j,
                 {"potential", "kappa", "epsilon", "alpha", "beta", "delta", "exploratory", "N",
                  "modes", "mode_cutoff", "cutoff_factor", "kernel", "doubling_N",
                  "eta_table_cutoff", "random_states", "seed", "threads", "dump_states",
                  "tolerances", "limits", "comment"},
                 "config");
  if (j.contains("potential")) {
    const json& p = j.at("potential");
    reject_unknown(p, {"model", "v0", "radius", "r_inner", "table"}, "potential");
    read(p, "model", c.potential.model, "potential");
    read(p, "v0", c.potential.v0, "potential");
    read(p, "radius", c.potential.radius, "potential");
    read(p, "r_inner", c.potential.r_inner, "potential");
    read(p, "table", c.potential.table, "potential");
    if (!c.potential.table.empty() && std::filesystem::path(c.potential.table).is_relative()) {
      c.potential.table = (base_dir / c.potential.table).string();
    }
  }
  read(j, "kappa", c.kappa, "config");
  read(j, "epsilon", c.epsilon, "config");
  read_opt(j, "alpha", c.alpha, "config");
  read_opt(j, "beta", c.beta, "config");
  read_opt(j, "delta", c.delta, "config");
  read(j, "exploratory", c.exploratory, "config");
  read_grid(j, "N", c.N);
  read(j, "modes", c.modes, "config");
  read_opt(j, "mode_cutoff", c.mode_cutoff, "config");
  read(j, "cutoff_factor", c.cutoff_factor, "config");
  read(j, "kernel", c.kernel, "config");
  read_grid(j, "doubling_N", c.doubling_N);
  read(j, "eta_table_cutoff", c.eta_table_cutoff, "config");
  read(j, "random_states", c.random_states, "config");
  read(j, "seed", c.seed, "config");
  read(j, "threads", c.threads, "config");
  read(j, "dump_states", c.dump_states, "config");
  if (j.contains("tolerances")) {
    const json& t = j.at("tolerances");
    reject_unknown(t, {"lanczos", "gap", "ode_steps", "integral", "exponent"}, "tolerances");
    read(t, "lanczos", c.tol.lanczos, "tolerances");
    read(t, "gap", c.tol.gap, "tolerances");
    read(t, "ode_steps", c.tol.ode_steps, "tolerances");
    read(t, "integral", c.tol.integral, "tolerances");
    read(t, "exponent", c.tol.exponent, "tolerances");
  }
  if (j.contains("limits")) {
    const json& l = j.at("limits");
    reject_unknown(l, {"max_modes", "max_dim"}, "limits");
    read(l, "max_modes", c.limits.max_modes, "limits");
    read(l, "max_dim", c.limits.max_dim, "limits");
  }
  if (c.kernel != "resolvent" && c.kernel != "truncated") {
    throw ConfigError("kernel must be 'resolvent' or 'truncated'");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, path.parent_path());
}

}  // namespace bosegas::app
