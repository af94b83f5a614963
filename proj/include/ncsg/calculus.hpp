#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ncsg/semigroup.hpp"

namespace ncsg {

/// A bounded holomorphic function on a sector Sigma_phi = {|arg z| < phi},
/// with boundary values m(iv) taken by direct evaluation on the imaginary
/// axis (the built-in families extend continuously there).
struct SectorFunction {
  std::string name;
  double angle = kPi / 2;  // half-angle of the declared boundedness sector
  std::function<Complex(Complex)> eval;
  std::optional<Complex> zero_limit;  // finite limit at 0, when declared

  Complex operator()(Complex z) const { return eval(z); }
  Complex at_real(double lam) const { return eval(Complex(lam, 0.0)); }

  /// sup |m| sampled over log-spaced radii on rays |arg z| <= phi - eps_frac*phi.
  double sup_norm_estimate(double eps_frac = 1e-3, int rays = 9, int radii = 120,
                           double rmin = 1e-6, double rmax = 1e6) const;

  // built-in parametric families (CLI-addressable by "name:param")
  static SectorFunction constant(Complex c);
  static SectorFunction imaginary_power(double u);            // z^{iu}
  static SectorFunction heat(double t);                       // e^{-tz}
  static SectorFunction m_theta_family(double theta);         // m_theta(z)
  static SectorFunction m_theta_scaled(double t, double theta);  // m_theta(t z)
  static SectorFunction rational(double a);                   // z/(z+a)
  static SectorFunction ergodic_average_symbol(double t);     // (1-e^{-tz})/(tz)
  static SectorFunction product(const SectorFunction& f, const SectorFunction& g);

  static SectorFunction parse(const std::string& text);  // e.g. "imaginary_power:1.5"
  static std::vector<std::string> builtin_catalog();     // stable ordering
};

/// Composite Gauss-Legendre discretization of integrals over u in [-U, U].
/// Unit-width panels, `nodes_per_unit` Gauss nodes per panel.
struct QuadratureSpec {
  double truncation = 30.0;
  int nodes_per_unit = 12;
  double tolerance = 1e-8;

  /// Truncation chosen from the boundary-envelope tail bound
  /// K e^{(|theta|-pi/2)U} / (pi/2-|theta|) < tolerance/10 with K = 10.
  static QuadratureSpec adaptive(double theta, double tolerance = 1e-8);
};

/// m_theta(lambda) = exp(-e^{i theta} lambda) - (1 - e^{-lambda})/lambda,
/// |theta| <= pi/2, lambda > 0. The limit at 0 is 0 (kMThetaZeroLimit).
Complex m_theta(double lambda, double theta);
inline constexpr Complex kMThetaZeroLimit{0.0, 0.0};

/// Complex Gamma function (Lanczos, g = 607/128, with reflection for
/// Re s < 1/2). Relative accuracy ~1e-13 for |Im s| <= 50.
Complex gamma_fn(Complex s);

/// n_theta_hat(u) = (e^{-theta u} - (1+iu)^{-1}) Gamma(-iu); the removable
/// singularity at u = 0 evaluates to -(1 + i theta).
Complex n_theta_hat(double u, double theta);

struct MellinResult {
  Complex value;
  double residual;          // |value - value at doubled (U, nodes)|
  double truncation_used;
};

/// Numerically integrates (1/2pi) \int_{-U}^{U} n_theta_hat(u) (t lambda)^{iu} du,
/// which reproduces m_theta(t lambda). Requires |theta| < pi/2 strictly.
MellinResult mellin_reconstruct(double t, double lambda, double theta,
                                const QuadratureSpec& quad);

/// A_t(lambda) = (1 - e^{-t lambda})/(t lambda), A_t(0) = 1; the spectral
/// symbol of (1/t) \int_0^t T_s ds.
double ergodic_symbol(double t, double lambda);

struct HMReport {
  double sup_m = 0.0;       // sup |m(iv)| over the grid
  double sup_v_dm = 0.0;    // sup |v d/dv m(iv)|
  std::optional<double> cauchy_bound;  // ||m||_inf cosec(phi - pi/2), when phi > pi/2
  bool within_cauchy = true;
};

/// Hoermander-Mihlin data on the imaginary axis; derivative by central
/// differences with relative step 1e-6. The grid is symmetrized (±v).
HMReport hm_condition_check(const SectorFunction& m, const std::vector<double>& v_grid);

struct EnvelopeResult {
  bool finite = false;
  double value = kInf;
};

/// C(p, psi) = (1/2pi) \int (p^2/(p-1)) (1+|u|^k)^{|1/p-1/2|}
///             exp(pi|1/p-1/2||u|) exp((psi-pi/2)|u|) du,
/// with the absolute constant normalized to 1 and the power index k
/// parameterized (default 12). Finite iff psi/pi < 1/2 - |1/p-1/2|.
EnvelopeResult envelope_constant(double p, double psi, double power_index = 12.0);

/// m(L) x = sum_k m(lambda_k) P_k x over nonzero clusters; the kernel cluster
/// uses m's declared zero limit, and P_0 x != 0 without one is an error.
AlgebraElement apply_multiplier(const SpectralDecomposition& dec, const SectorFunction& m,
                                const AlgebraElement& x);

/// GNS matrix of the multiplier (kernel handling as in apply_multiplier,
/// with 0 on the kernel when no limit is declared).
Superoperator multiplier_superoperator(const SpectralDecomposition& dec,
                                       const SectorFunction& m);

/// L^{iu} x = sum_k e^{iu ln lambda_k} P_k x; L_2-isometry on (ker L)^perp.
AlgebraElement imaginary_power(const SpectralDecomposition& dec, double u,
                               const AlgebraElement& x);

/// T_z x = sum_k e^{-z lambda_k} P_k x for Re z >= 0.
AlgebraElement apply_Tz(const SpectralDecomposition& dec, Complex z, const AlgebraElement& x);

}  // namespace ncsg
