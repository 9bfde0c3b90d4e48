#include "app/commands.hpp"

#include <cmath>
#include <limits>
#include <new>
#include <ostream>

#include "app/report.hpp"
#include "bosegas/csv.hpp"
#include "bosegas/errors.hpp"
#include "bosegas/fock.hpp"
#include "bosegas/kernels.hpp"
#include "bosegas/renorm_check.hpp"
#include "bosegas/twobody.hpp"

namespace bosegas::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ScatteringData scatter(const ExperimentConfig& cfg, const RadialPotential& V) {
  ScatteringOptions opts;
  opts.steps = cfg.tol.ode_steps;
  opts.integral_tol = cfg.tol.integral;
  return scattering_length(V, opts);
}

std::string ivec(const IVec3& n) { return format_ivec(n); }

CommandResult finish(const fs::path& out, const std::string& command, const ExperimentConfig& cfg,
                     const std::vector<fs::path>& files, bool ok) {
  CommandResult r;
  r.content_hash = write_manifest(out, command, cfg.to_json(), files);
  r.exit_code = ok ? kOk : kInvariant;
  return r;
}

double analytic_soft_sphere(const PotentialSpec& p) {
  if (p.model != "soft_sphere") return std::numeric_limits<double>::quiet_NaN();
  if (p.v0 == 0.0) return 0.0;
  const double mu = std::sqrt(p.v0 / 2.0);
  return p.radius - std::tanh(mu * p.radius) / mu;
}

}  // namespace

CommandResult cmd_scatter(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  cfg.validate_basic();
  const RadialPotential V = cfg.potential.build();
  const ScatteringData sd = scatter(cfg, V);
  const TailReport tail = zero_energy_tail_check(sd, V);
  const double v0hat = v_hat(V, 0.0);
  const double exact = analytic_soft_sphere(cfg.potential);

  const double R = V.support_radius();
  Table profile({"r", "f", "w", "V"});
  double fmin = 1.0, fmax = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double r = 4.0 * R * i / 400;
    const double f = sd.f(r);
    fmin = std::min(fmin, f);
    fmax = std::max(fmax, f);
    profile.add({r, f, 1.0 - f, V(r)});
  }
  const bool born = sd.eight_pi_a >= 0.0 && sd.eight_pi_a <= v0hat * (1.0 + 1e-12);
  const bool f_range = fmin >= -1e-14 && fmax <= 1.0 + 1e-14;

  Table t({"quantity", "value"});
  t.add({"model", V.model_name()});
  t.add({"support_radius", R});
  t.add({"a", sd.a});
  t.add({"a_analytic", exact});
  t.add({"a_rel_error", std::isnan(exact) || exact == 0.0 ? std::abs(sd.a - exact) : std::abs(sd.a / exact - 1.0)});
  t.add({"eight_pi_a", sd.eight_pi_a});
  t.add({"integral_V_f", sd.eight_pi_a_integral});
  t.add({"integral_deviation", std::abs(sd.eight_pi_a - sd.eight_pi_a_integral)});
  t.add({"V_hat_0", v0hat});
  t.add({"born_margin", v0hat - sd.eight_pi_a});
  t.add({"tail_max_deviation", tail.max_deviation});
  t.add({"r_w_min", tail.min_r_w});
  t.add({"r_w_max", tail.max_r_w});
  t.add({"f_min", fmin});
  t.add({"f_max", fmax});
  t.add({"born_bound_holds", born});
  t.add({"f_in_unit_interval", f_range});

  std::vector<fs::path> files;
  t.write(out, "scatter", files);
  profile.write(out, "scatter_profile", files);
  log << "a = " << format_double(sd.a) << ", 8 pi a = " << format_double(sd.eight_pi_a)
      << ", tail deviation = " << format_double(tail.max_deviation) << "\n";
  return finish(out, "scatter", cfg, files, born && f_range);
}

CommandResult cmd_twobody(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  cfg.validate_basic();
  const RadialPotential V = cfg.potential.build();
  const ScatteringData sd = scatter(cfg, V);
  std::vector<fs::path> files;

  Table bounds({"N", "L", "kernel", "ambient_cutoff", "low_modes", "sectors", "eight_pi_a", "vren00",
                "lhs", "lhy_correction", "lhy_residual", "sup_vren", "sup_vren_C", "sup_eta",
                "eta_elements", "max_solve_residual"});
  std::vector<double> ns, lhs_abs;
  for (long N : cfg.N) {
    const CheckConfig cc = cfg.check_config(N);
    check_torus_embedding(V, N, cfg.kappa);
    std::optional<RenormKernel> kernel;
    double cutoff = std::numeric_limits<double>::infinity();
    if (cfg.kernel == "resolvent") {
      const double table_cut = std::max(cfg.eta_table_cutoff, 2.0 * std::pow(double(N), cc.alpha));
      const ModeSet table = build_mode_set(table_cut, cfg.limits.max_modes);
      kernel.emplace(build_resolvent_kernel(V, sd, N, cfg.kappa, low_set(table, N, cc.alpha), table));
    } else {
      cutoff = ambient_cutoff(cfg.cutoff_factor, V, N, cfg.kappa);
      const ModeSet ambient = build_mode_set(cutoff, cfg.limits.max_modes);
      ScaledVhat vn(V, N, cfg.kappa, 4 * ambient.max_nsq());
      kernel.emplace(build_kernel(ambient, low_set(ambient, N, cc.alpha), vn));
    }
    const KernelBounds kb = verify_kernel_bounds(*kernel, sd, cc.alpha);
    const LhyReport lhy = lhy_refinement(*kernel, sd);
    const double L = length_scale(N, cfg.kappa);
    bounds.add({N, L, kernel->kind_name(), cutoff, kernel->low().size(), kernel->sectors().size(),
                sd.eight_pi_a, lhy.lhs + sd.eight_pi_a, lhy.lhs, lhy.correction, lhy.residual,
                kb.sup_vren, kb.sup_vren_C, kb.sup_eta, kb.eta_elements, kernel->max_residual()});
    ns.push_back(double(N));
    lhs_abs.push_back(std::abs(lhy.lhs));

    Table kt({"P", "k1", "k2", "k3", "k4", "value", "kind"});
    for (const auto& sk : kernel->sectors()) {
      for (std::size_t i = 0; i < sk.low_first.size(); ++i)
        for (std::size_t j = 0; j < sk.low_first.size(); ++j)
          kt.add({ivec(sk.P), ivec(sk.low_first[i]), ivec(sk.P - sk.low_first[i]), ivec(sk.low_first[j]),
                  ivec(sk.P - sk.low_first[j]), sk.vren(i, j), "vren"});
      for (std::size_t h = 0; h < sk.high_first.size(); ++h)
        for (std::size_t j = 0; j < sk.low_first.size(); ++j)
          kt.add({ivec(sk.P), ivec(sk.high_first[h]), ivec(sk.P - sk.high_first[h]), ivec(sk.low_first[j]),
                  ivec(sk.P - sk.low_first[j]), sk.eta(h, j), "eta"});
    }
    kt.write(out, "kernel_N" + std::to_string(N), files);
    log << "N = " << N << ": V_ren(00,00) - 8 pi a = " << format_double(lhy.lhs)
        << ", LHY residual = " << format_double(lhy.residual) << "\n";
  }
  bounds.write(out, "kernel_bounds", files);

  Table fit({"quantity", "fitted_exponent", "target_exponent", "points"});
  fit.add({"abs_vren00_minus_8pia", loglog_slope(ns, lhs_abs),
           cfg.kappa - 1.0 + cfg.check_config(cfg.N.front()).alpha, ns.size()});
  fit.write(out, "twobody_fit", files);

  Table dbl({"N", "cutoff", "cutoff_doubled", "modes", "modes_doubled", "vren00", "vren00_doubled",
             "change", "change_over_deviation", "extrapolated", "resolvent_vren00", "eta_sup",
             "eta_sup_doubled", "eta_sup_rel_change", "status"});
  for (long N : cfg.doubling_N) {
    const CheckConfig cc = cfg.check_config(N);
    const double c1 = ambient_cutoff(cfg.cutoff_factor, V, N, cfg.kappa);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
      ScaledVhat vn(V, N, cfg.kappa);
      const LowSet low = low_set(build_mode_set(c1, cfg.limits.max_modes), N, cc.alpha);
      const ZeroChannel z1 = zero_channel_renormalize(vn, low, c1, cfg.limits.max_modes * 10);
      const ZeroChannel z2 = zero_channel_renormalize(vn, low, 2 * c1, cfg.limits.max_modes * 10);
      const double change = z2.vren00 - z1.vren00;
      const ModeSet table = build_mode_set(std::max(cfg.eta_table_cutoff, 2.0 * low.threshold()));
      const RenormKernel rk =
          build_resolvent_kernel(V, sd, N, cfg.kappa, low_set(table, N, cc.alpha), table);
      const double e1 = z1.eta_weighted_sup(), e2 = z2.eta_weighted_sup();
      dbl.add({N, c1, 2 * c1, z1.modes, z2.modes, z1.vren00, z2.vren00, change,
               std::abs(change) / std::abs(z2.vren00 - sd.eight_pi_a), 2 * z2.vren00 - z1.vren00,
               rk.vren({0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}), e1, e2,
               e1 > 0 ? std::abs(e2 - e1) / e1 : 0.0, "ok"});
    } catch (const ResourceError& e) {
      dbl.add({N, c1, 2 * c1, 0, 0, nan, nan, nan, nan, nan, nan, nan, nan, nan, "resource_limit"});
      log << "cutoff doubling at N = " << N << " skipped: " << e.what() << "\n";
    }
  }
  dbl.write(out, "cutoff_doubling", files);
  return finish(out, "twobody", cfg, files, true);
}

CommandResult cmd_ed(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  cfg.validate_many_body();
  const RadialPotential V = cfg.potential.build();
  const ScatteringData sd = scatter(cfg, V);
  const ModeSet ms = cfg.fock_modes();
  std::vector<fs::path> files;
  bool ok = true;

  Table ed({"N", "M", "dim", "nnz", "energy", "residual", "ritz_gap", "degenerate", "energy_ratio",
            "condensate_fraction", "depletion", "fraction_plus_depletion", "kinetic", "n_plus",
            "n_above", "hartree_upper", "hartree_holds", "pair_oracle", "pair_oracle_rel_diff"});
  Table g1({"N", "mode", "psq", "occupation_fraction"});
  for (long N : cfg.N) {
    const CheckConfig cc = cfg.check_config(N);
    FockBasis basis(ms, static_cast<int>(N), cfg.limits.max_dim);
    ScaledVhat vn(V, N, cfg.kappa, 4 * ms.max_nsq());
    const CsrMatrix H = build_hamiltonian(basis, vn);
    LanczosOptions lo;
    lo.tol = cfg.tol.lanczos;
    lo.seed = cfg.seed;
    const GroundState gs = ground_state(H, lo);
    const Observables obs = observables(gs.psi, basis, H, std::pow(double(N), cc.beta));
    const TheoremRow tr = theorem_row(basis, gs, obs, vn, sd);
    const double sum = obs.condensate_fraction + obs.depletion;
    json oracle = nullptr, oracle_diff = nullptr;
    if (N == 2) {
      const double e2 = bosonic_pair_ground_energy(ms, vn);
      const double rel = std::abs(gs.energy - e2) / std::max(1.0, std::abs(e2));
      oracle = e2;
      oracle_diff = rel;
      ok = ok && rel <= 1e-10;
      log << "N = 2: Fock " << format_double(gs.energy) << " vs pair spectrum " << format_double(e2) << "\n";
    }
    ok = ok && tr.hartree_holds && std::abs(sum - 1.0) <= 1e-12;
    ed.add({N, ms.size(), basis.dim(), H.nnz(), gs.energy, gs.residual, gs.gap, gs.degenerate,
            tr.energy_ratio, obs.condensate_fraction, obs.depletion, sum, obs.kinetic, obs.n_plus,
            obs.n_above, tr.hartree_upper, tr.hartree_holds, oracle, oracle_diff});
    for (std::size_t m = 0; m < ms.size(); ++m) g1.add({N, ivec(ms[m].n), ms[m].psq(), obs.gamma1_diag[m]});
    if (cfg.dump_states) {
      const fs::path p = out / ("psi_N" + std::to_string(N) + ".bin");
      write_state(p, gs.psi);
      files.push_back(p);
    }
    log << "N = " << N << ": E0 = " << format_double(gs.energy)
        << ", condensate fraction = " << format_double(obs.condensate_fraction) << "\n";
  }
  ed.write(out, "ed", files);
  g1.write(out, "gamma1_diag", files);
  return finish(out, "ed", cfg, files, ok);
}

CommandResult cmd_verify(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  cfg.validate_many_body();
  const RadialPotential V = cfg.potential.build();
  const ModeSet ms = cfg.fock_modes();
  std::vector<fs::path> files;
  bool ok = true;

  Table gap({"N", "low_modes", "state", "lhs", "kinetic_c", "vren_term", "rn_term", "rn_direct",
             "gap", "dropped", "gap_minus_dropped", "holds"});
  Table mk({"N", "beta", "zeta", "states", "violations", "max_ratio", "expect_n_above",
            "expect_kinetic", "expect_energy", "second_holds"});
  for (long N : cfg.N) {
    const CheckConfig cc = cfg.check_config(N);
    const LowSet low = low_set(ms, N, cc.alpha);
    ScaledVhat vn(V, N, cfg.kappa, 4 * ms.max_nsq());
    const RenormKernel kernel = build_kernel(ms, low, vn, KernelKind::ModelConsistent);
    FockBasis basis(ms, static_cast<int>(N), cfg.limits.max_dim);
    const CsrMatrix H = build_hamiltonian(basis, vn);
    LanczosOptions lo;
    lo.tol = cfg.tol.lanczos;
    lo.seed = cfg.seed;
    const GroundState gs = ground_state(H, lo);
    GapEvaluator ev(basis, kernel, vn, H);
    std::size_t failures = 0;
    for (int i = 0; i <= cfg.random_states; ++i) {
      const StateVector psi = i == 0 ? gs.psi : random_state(basis.dim(), cfg.seed + i);
      GapReport g = ev.evaluate(psi);
      g.holds = g.gap >= -cfg.tol.gap * std::max(1.0, std::abs(g.lhs));
      if (g.asserted && !g.holds) ++failures;
      gap.add({N, low.size(), i == 0 ? std::string("ground") : "random_" + std::to_string(i), g.lhs,
               g.kinetic_c, g.vren_term, g.rn_term, g.rn_direct, g.gap, g.dropped, g.gap - g.dropped,
               g.holds});
    }
    const MarkovReport m = markov_check(basis, cc, gs.psi, H);
    mk.add({N, cc.beta, std::pow(double(N), cc.beta), m.states, m.violations, m.max_ratio,
            m.expect_n_above, m.expect_kinetic, m.expect_energy, m.second_holds});
    ok = ok && failures == 0 && m.violations == 0 && m.second_holds;
    log << "N = " << N << ", |P_L| = " << low.size() << ": " << (cfg.random_states + 1)
        << " gap rows, " << failures << " violations; Markov violations " << m.violations << "\n";
  }
  gap.write(out, "gap", files);
  mk.write(out, "markov", files);
  return finish(out, "verify", cfg, files, ok);
}

CommandResult cmd_scan(const ExperimentConfig& cfg, const fs::path& out, std::ostream& log) {
  cfg.validate_many_body();
  if (cfg.N.size() < 4) throw ConfigError("scan needs an N grid with at least 4 points");
  const RadialPotential V = cfg.potential.build();
  const ScatteringData sd = scatter(cfg, V);
  const ModeSet ms = cfg.fock_modes();
  std::vector<fs::path> files;

  Table ap({"N", "M", "beta", "n_above", "k_n_above", "k_n2_above"});
  Table th({"N", "M", "energy", "energy_ratio", "condensate_fraction", "depletion", "hartree_upper",
            "hartree_holds"});
  std::vector<AprioriRow> rows;
  bool ok = true;
  for (long N : cfg.N) {
    const CheckConfig cc = cfg.check_config(N);
    FockBasis basis(ms, static_cast<int>(N), cfg.limits.max_dim);
    ScaledVhat vn(V, N, cfg.kappa, 4 * ms.max_nsq());
    const CsrMatrix H = build_hamiltonian(basis, vn);
    LanczosOptions lo;
    lo.tol = cfg.tol.lanczos;
    lo.seed = cfg.seed;
    const GroundState gs = ground_state(H, lo);
    const Observables obs = observables(gs.psi, basis, H, std::pow(double(N), cc.beta));
    const AprioriRow r = apriori_row(basis, gs.psi, cc.beta);
    rows.push_back(r);
    const TheoremRow t = theorem_row(basis, gs, obs, vn, sd);
    ok = ok && t.hartree_holds;
    ap.add({N, ms.size(), cc.beta, r.n_above, r.k_n_above, r.k_n2_above});
    th.add({N, ms.size(), t.energy, t.energy_ratio, t.condensate_fraction, t.depletion, t.hartree_upper,
            t.hartree_holds});
  }
  const CheckConfig c0 = cfg.check_config(cfg.N.front());
  Table fit({"quantity", "fitted_exponent", "bound_exponent", "tolerance", "within"});
  for (const auto& f : apriori_fits(rows, cfg.kappa, c0.beta, cfg.tol.exponent)) {
    fit.add({f.quantity, f.fitted, f.bound, cfg.tol.exponent, f.within});
    ok = ok && f.within;
    log << f.quantity << ": fitted exponent " << format_double(f.fitted) << " vs bound "
        << format_double(f.bound) << "\n";
  }
  ap.write(out, "apriori", files);
  fit.write(out, "apriori_fit", files);
  th.write(out, "theorem", files);
  return finish(out, "scan", cfg, files, ok);
}

CommandResult run_command(const std::string& name, const ExperimentConfig& cfg, const fs::path& out,
                          std::ostream& log) {
  CommandResult res;
  try {
    kernels::set_threads(cfg.threads);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory " + out.string() + ": " + ec.message());
    if (name == "scatter") return cmd_scatter(cfg, out, log);
    if (name == "twobody") return cmd_twobody(cfg, out, log);
    if (name == "ed") return cmd_ed(cfg, out, log);
    if (name == "verify") return cmd_verify(cfg, out, log);
    if (name == "scan") return cmd_scan(cfg, out, log);
    throw ConfigError("unknown command '" + name + "'");
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    res.exit_code = kConfig;
  } catch (const DomainError& e) {
    log << "domain error: " << e.what() << "\n";
    res.exit_code = kConfig;
  } catch (const ResourceError& e) {
    log << "resource limit: " << e.what() << "\n";
    res.exit_code = kResource;
  } catch (const std::bad_alloc&) {
    log << "resource limit: out of memory\n";
    res.exit_code = kResource;
  } catch (const std::exception& e) {
    log << "invariant violated: " << e.what() << "\n";
    res.exit_code = kInvariant;
  }
  return res;
}

}  // namespace bosegas::app
