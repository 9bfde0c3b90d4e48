#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace bosegas {

enum class PotentialModel { SoftSphere, Shell, Tabulated };

/// Compactly supported, radial, non-negative pair potential V(r), stored as
/// linear pieces on [0, R]. Quadratures and the radial ODE integrate piece by
/// piece so discontinuities of the soft sphere and shell sit on nodes.
class RadialPotential {
 public:
  struct Piece {
    double r0, r1;  // r0 < r1
    double v0, v1;  // values at the ends, linear in between
  };

  /// V = v0 for r <= R.
  static RadialPotential soft_sphere(double v0, double radius);
  /// V = v0 for r_inner <= r <= R.
  static RadialPotential shell(double v0, double r_inner, double radius);
  /// Linear interpolation of (r_i, V_i); r strictly increasing, last V = 0.
  /// Negative samples are clamped to 0.
  static RadialPotential tabulated(std::vector<double> r, std::vector<double> v);
  /// Two-column text file "r V(r)"; '#' starts a comment.
  static RadialPotential load_table(const std::filesystem::path& path);

  double operator()(double r) const;
  /// Value on piece i, so one-sided limits at jumps are honoured.
  double piece_value(std::size_t i, double r) const;

  PotentialModel model() const { return model_; }
  std::string model_name() const;
  const std::vector<Piece>& pieces() const { return pieces_; }
  double support_radius() const { return pieces_.back().r1; }
  bool is_zero() const;
  /// Integral of V over R^3, which equals v_hat(V, 0).
  double integral() const;

 private:
  PotentialModel model_ = PotentialModel::SoftSphere;
  std::vector<Piece> pieces_;
};

/// 3D Fourier transform of V at |wavevector| = k:
/// 4 pi int_0^R r^2 V(r) sinc(k r) dr by composite Simpson.
double v_hat(const RadialPotential& V, double k, int panels = 10000);

struct ScatteringOptions {
  int steps = 10000;             // RK4 steps over [0, R]
  double integral_tol = 1e-8;    // |8 pi a - int V f|
};

/// Zero-energy scattering solution of (-2 Laplace + V) f = 0, f -> 1, in the
/// radial form -2 u'' + V u = 0 with u = r f.
struct ScatteringData {
  double a = 0.0;                    // scattering length
  double eight_pi_a = 0.0;           // 8 pi a from the tail
  double eight_pi_a_integral = 0.0;  // int V f by quadrature
  double support_radius = 0.0;
  double u_prime_R = 1.0;            // u'(R) with u'(0) = 1
  bool free = false;                 // V = 0: f = 1, a = 0
  std::vector<double> r_grid, u_grid, du_grid;

  /// f(r); cubic Hermite inside the support, 1 - a/r outside.
  double f(double r) const;
  double w(double r) const { return 1.0 - f(r); }
};

/// Throws DomainError when u'(R) <= 0 and NumericError when the integral
/// identity 8 pi a = int V f fails the tolerance.
ScatteringData scattering_length(const RadialPotential& V, const ScatteringOptions& opts = {});

/// Fourier transform of V f at |wavevector| = k.
double vf_hat(const ScatteringData& sd, const RadialPotential& V, double k);

struct TailReport {
  double max_deviation = 0.0;  // max |f(r) - (1 - a/r)| on (R, 4R]
  double max_r_w = 0.0;        // max r w(r) on (R, 4R]
  double min_r_w = 0.0;
};

TailReport zero_energy_tail_check(const ScatteringData& sd, const RadialPotential& V,
                                  int samples = 1000);

}  // namespace bosegas
