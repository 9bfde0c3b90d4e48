#include "bosegas/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "bosegas/errors.hpp"

namespace bosegas {
namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

void check_radius(double radius) {
  if (!(radius > 0.0) || !(radius < 0.5)) {
    throw ConfigError("potential support radius must lie in (0, 1/2), got " +
                      std::to_string(radius));
  }
}

/// Even step counts per piece, proportional to length, summing to about `total`.
std::vector<int> split_steps(const std::vector<RadialPotential::Piece>& pieces, int total) {
  const double radius = pieces.back().r1;
  std::vector<int> out;
  for (const auto& pc : pieces) {
    int n = static_cast<int>(std::lround(total * (pc.r1 - pc.r0) / radius));
    n = std::max(2, n + (n % 2));
    out.push_back(n);
  }
  return out;
}

template <class F>
double simpson_pieces(const std::vector<RadialPotential::Piece>& pieces, int total, F&& f) {
  const auto steps = split_steps(pieces, total);
  double sum = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& pc = pieces[i];
    const int n = steps[i];
    const double h = (pc.r1 - pc.r0) / n;
    double s = f(i, pc.r0) + f(i, pc.r1);
    for (int j = 1; j < n; ++j) s += (j % 2 ? 4.0 : 2.0) * f(i, pc.r0 + j * h);
    sum += s * h / 3.0;
  }
  return sum;
}

}  // namespace

RadialPotential RadialPotential::soft_sphere(double v0, double radius) {
  check_radius(radius);
  if (!(v0 >= 0.0)) throw ConfigError("soft sphere strength must be >= 0");
  RadialPotential V;
  V.model_ = PotentialModel::SoftSphere;
  V.pieces_ = {{0.0, radius, v0, v0}};
  return V;
}

RadialPotential RadialPotential::shell(double v0, double r_inner, double radius) {
  check_radius(radius);
  if (!(v0 >= 0.0)) throw ConfigError("shell strength must be >= 0");
  if (!(r_inner > 0.0 && r_inner < radius)) throw ConfigError("shell needs 0 < r_inner < R");
  RadialPotential V;
  V.model_ = PotentialModel::Shell;
  V.pieces_ = {{0.0, r_inner, 0.0, 0.0}, {r_inner, radius, v0, v0}};
  return V;
}

RadialPotential RadialPotential::tabulated(std::vector<double> r, std::vector<double> v) {
  if (r.size() != v.size() || r.size() < 2) {
    throw ConfigError("tabulated potential needs at least two (r, V) samples");
  }
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) throw ConfigError("tabulated potential: r must be strictly increasing");
  }
  if (r.front() < 0.0) throw ConfigError("tabulated potential: r must be >= 0");
  if (v.back() != 0.0) throw ConfigError("tabulated potential: last sample must have V = 0");
  check_radius(r.back());
  for (auto& x : v) x = std::max(0.0, x);
  RadialPotential V;
  V.model_ = PotentialModel::Tabulated;
  if (r.front() > 0.0) V.pieces_.push_back({0.0, r.front(), v.front(), v.front()});
  for (std::size_t i = 1; i < r.size(); ++i) V.pieces_.push_back({r[i - 1], r[i], v[i - 1], v[i]});
  return V;
}

RadialPotential RadialPotential::load_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open potential table " + path.string());
  std::vector<double> r, v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a)) continue;
    if (!(ls >> b)) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
    }
    r.push_back(a);
    v.push_back(b);
  }
  return tabulated(std::move(r), std::move(v));
}

double RadialPotential::piece_value(std::size_t i, double r) const {
  const auto& pc = pieces_[i];
  return pc.v0 + (pc.v1 - pc.v0) * (r - pc.r0) / (pc.r1 - pc.r0);
}

double RadialPotential::operator()(double r) const {
  if (r < 0.0 || r > support_radius()) return 0.0;
  auto it = std::lower_bound(pieces_.begin(), pieces_.end(), r,
                             [](const Piece& pc, double x) { return pc.r1 < x; });
  return piece_value(static_cast<std::size_t>(it - pieces_.begin()), r);
}

std::string RadialPotential::model_name() const {
  switch (model_) {
    case PotentialModel::SoftSphere: return "soft_sphere";
    case PotentialModel::Shell: return "shell";
    case PotentialModel::Tabulated: return "tabulated";
  }
  return "unknown";
}

bool RadialPotential::is_zero() const {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const Piece& pc) { return pc.v0 == 0.0 && pc.v1 == 0.0; });
}

double RadialPotential::integral() const {
  // Exact for linear pieces: 4 pi int r^2 (c0 + c1 r) dr.
  double sum = 0.0;
  for (const auto& pc : pieces_) {
    const double slope = (pc.v1 - pc.v0) / (pc.r1 - pc.r0);
    const double c0 = pc.v0 - slope * pc.r0;
    auto prim = [&](double r) { return c0 * r * r * r / 3.0 + slope * r * r * r * r / 4.0; };
    sum += prim(pc.r1) - prim(pc.r0);
  }
  return kFourPi * sum;
}

double v_hat(const RadialPotential& V, double k, int panels) {
  if (k < 0.0) throw ConfigError("v_hat needs k >= 0");
  return kFourPi * simpson_pieces(V.pieces(), panels, [&](std::size_t i, double r) {
           return r * r * V.piece_value(i, r) * sinc(k * r);
         });
}

ScatteringData scattering_length(const RadialPotential& V, const ScatteringOptions& opts) {
  ScatteringData sd;
  sd.support_radius = V.support_radius();
  const auto& pieces = V.pieces();
  const auto steps = split_steps(pieces, opts.steps);

  double u = 0.0, du = 1.0;
  sd.r_grid.push_back(0.0);
  sd.u_grid.push_back(u);
  sd.du_grid.push_back(du);
  // Simpson accumulation of int_0^R r V u dr on the RK4 nodes.
  double moment = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& pc = pieces[i];
    const int n = steps[i];
    const double h = (pc.r1 - pc.r0) / n;
    auto accel = [&](double r, double uu) { return 0.5 * V.piece_value(i, r) * uu; };
    double piece_sum = pc.r0 * V.piece_value(i, pc.r0) * u;
    for (int j = 0; j < n; ++j) {
      const double r = pc.r0 + j * h;
      const double k1u = du, k1d = accel(r, u);
      const double k2u = du + 0.5 * h * k1d, k2d = accel(r + 0.5 * h, u + 0.5 * h * k1u);
      const double k3u = du + 0.5 * h * k2d, k3d = accel(r + 0.5 * h, u + 0.5 * h * k2u);
      const double k4u = du + h * k3d, k4d = accel(r + h, u + h * k3u);
      u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
      const double rn = (j + 1 == n) ? pc.r1 : pc.r0 + (j + 1) * h;
      sd.r_grid.push_back(rn);
      sd.u_grid.push_back(u);
      sd.du_grid.push_back(du);
      const double weight = (j + 1 == n) ? 1.0 : ((j + 1) % 2 ? 4.0 : 2.0);
      piece_sum += weight * rn * V.piece_value(i, rn) * u;
    }
    moment += piece_sum * h / 3.0;
  }
  if (!(du > 0.0) || !std::isfinite(du)) {
    throw DomainError("zero-energy solution has u'(R) <= 0: potential is past its first "
                      "resonance, scattering length undefined");
  }
  const double R = sd.support_radius;
  if (V.is_zero()) {
    // u = r exactly; avoid RK4 rounding in a = 0.
    sd.u_grid = sd.r_grid;
    std::fill(sd.du_grid.begin(), sd.du_grid.end(), 1.0);
    sd.free = true;
    return sd;
  }
  sd.u_prime_R = du;
  sd.a = R - u / du;
  sd.eight_pi_a = 8.0 * std::numbers::pi * sd.a;
  sd.eight_pi_a_integral = kFourPi * moment / du;
  const double tol = opts.integral_tol * std::max(1.0, std::abs(sd.eight_pi_a));
  if (!(std::abs(sd.eight_pi_a - sd.eight_pi_a_integral) <= tol)) {
    throw NumericError("8 pi a = int V f check failed: " + std::to_string(sd.eight_pi_a) +
                       " vs " + std::to_string(sd.eight_pi_a_integral));
  }
  return sd;
}

double ScatteringData::f(double r) const {
  const double R = support_radius;
  if (free) return 1.0;
  if (r >= R) {
    const double uR = u_grid.back();
    return (uR + u_prime_R * (r - R)) / (r * u_prime_R);
  }
  if (r <= 0.0) return du_grid.front() / u_prime_R;
  auto it = std::upper_bound(r_grid.begin(), r_grid.end(), r);
  const std::size_t j = static_cast<std::size_t>(it - r_grid.begin());
  const std::size_t i = j - 1;
  const double h = r_grid[j] - r_grid[i];
  const double t = (r - r_grid[i]) / h;
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  const double uu =
      h00 * u_grid[i] + h10 * h * du_grid[i] + h01 * u_grid[j] + h11 * h * du_grid[j];
  return uu / (r * u_prime_R);
}

double vf_hat(const ScatteringData& sd, const RadialPotential& V, double k) {
  // 4 pi int r^2 V f sinc(k r) dr with r f = u / u'(R), Simpson on the ODE nodes.
  const auto& pieces = V.pieces();
  double total = 0.0;
  std::size_t node = 0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& pc = pieces[i];
    std::size_t end = node;
    while (end + 1 < sd.r_grid.size() && sd.r_grid[end + 1] <= pc.r1) ++end;
    const std::size_t n = end - node;
    const double h = (pc.r1 - pc.r0) / static_cast<double>(n);
    double s = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      const double r = sd.r_grid[node + j];
      const double wgt = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      s += wgt * r * V.piece_value(i, r) * sd.u_grid[node + j] * sinc(k * r);
    }
    total += s * h / 3.0;
    node = end;
  }
  return kFourPi * total / sd.u_prime_R;
}

TailReport zero_energy_tail_check(const ScatteringData& sd, const RadialPotential& V,
                                  int samples) {
  // Integrates -2u'' + V u = 0 on through (R, 4R] from the stored (u, u') at R,
  // one RK4 step per sample, and compares u / (r u'(R)) with 1 - a/r.
  const double R = V.support_radius();
  TailReport rep;
  rep.min_r_w = std::numeric_limits<double>::infinity();
  double u = sd.free ? R : sd.u_grid.back();
  double du = sd.free ? 1.0 : sd.du_grid.back();
  const double h = 3.0 * R / samples;
  // right limit at R, so a jump at the edge of the support is not picked up
  auto accel = [&](double r, double uu) { return r > R ? 0.5 * V(r) * uu : 0.0; };
  for (int i = 1; i <= samples; ++i) {
    const double r0 = R + h * (i - 1);
    const double k1u = du, k1d = accel(r0, u);
    const double k2u = du + 0.5 * h * k1d, k2d = accel(r0 + 0.5 * h, u + 0.5 * h * k1u);
    const double k3u = du + 0.5 * h * k2d, k3d = accel(r0 + 0.5 * h, u + 0.5 * h * k2u);
    const double k4u = du + h * k3d, k4d = accel(r0 + h, u + h * k3u);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    const double r = R + 3.0 * R * i / samples;
    const double f = u / (r * sd.u_prime_R);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(f - (1.0 - sd.a / r)));
    const double rw = r * (1.0 - f);
    rep.max_r_w = std::max(rep.max_r_w, rw);
    rep.min_r_w = std::min(rep.min_r_w, rw);
  }
  return rep;
}

}  // namespace bosegas
