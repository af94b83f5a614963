#pragma once

#include "ncsg/calculus.hpp"

namespace ncsg {

/// (1/t) \int_0^t T_s x ds, computed exactly through the spectral symbol
/// A_t(lambda) = (1 - e^{-t lambda})/(t lambda), A_t(0) = 1.
AlgebraElement ergodic_average(const SpectralDecomposition& dec, const AlgebraElement& x,
                               double t);

/// || T_{t e^{i theta}} x - m_theta(tL) x - (1/t)\int_0^t T_s x ds ||_2.
/// The two sides go through independent scalar paths (complex exponential vs
/// m_theta + ergodic symbol); the identity is exact, so the residual is
/// roundoff-level.
double decomposition_check(const SpectralDecomposition& dec, const AlgebraElement& x, double t,
                           double theta);

struct ContourSpec {
  double angle = 0.0;         // ray half-angle; 0 = auto ((pi/2 - |arg z|)/2, capped)
  double inner_radius = 0.0;  // 0 = auto (half the spectral gap)
  int panels_per_ray = 200;   // Gauss-Legendre panels, geometric subdivision
  int nodes_per_panel = 4;
  int arc_panels = 8;
};

struct ContourResult {
  AlgebraElement value;
  double residual;  // || value - T_z x ||_2 against the spectral path
};

/// Resolvent contour representation
///   T_z x = (1/2 pi i) \oint e^{-z lambda} (lambda - L)^{-1} x dlambda
/// over the boundary of {inner_radius < |lambda|, |arg lambda| < angle},
/// for x in (ker L)^perp (the kernel eigenvalue stays outside the contour).
ContourResult contour_Tz(const SpectralDecomposition& dec, Complex z, const AlgebraElement& x,
                         const ContourSpec& spec = {});

enum class WitnessMode { bilateral, one_sided };
enum class ErgodicTarget { identity_limit, fixed_point_limit };

struct DecayRow {
  Complex z;
  double norm = 0.0;
};

struct WitnessResult {
  ProjectionElement witness;
  double complement_trace = 0.0;  // tau(e^perp), strictly below epsilon
  std::vector<DecayRow> decay;    // ||e (T_z x - target) e||_inf (or one-sided) along the grid
  double fitted_rate = 0.0;       // least-squares slope of log norm vs log |z|
};

/// Realizes the proof object behind almost-uniform convergence at finite
/// scale: a = mean over a disc contour of |T_zeta x|^2 dominates the
/// variation, e = spectral projection of a^{1/2} below ||a^{1/2}||_2 /
/// epsilon^{1/2} has tau(e^perp) < epsilon by Chebyshev.
WitnessResult witness_projection(const SpectralDecomposition& dec, const AlgebraElement& x,
                                 double epsilon, const std::vector<Complex>& z_grid,
                                 WitnessMode mode, ErgodicTarget target);

/// Canonical splitting x = (P_0 x) + (x - P_0 x) into the fixed-point part
/// N(L) and the closure of the range, GNS-orthogonal.
std::pair<AlgebraElement, AlgebraElement> splitting(const SpectralDecomposition& dec,
                                                    const AlgebraElement& x);

struct ConvergenceReport {
  std::string target;
  std::vector<DecayRow> rows;  // ||T_z x - target||_p ordered by the given grid
  double fitted_rate = 0.0;
  nlohmann::json to_json() const;
};

ConvergenceReport convergence_report(const SpectralDecomposition& dec, const AlgebraElement& x,
                                     const std::vector<Complex>& z_grid, double p,
                                     ErgodicTarget target);

}  // namespace ncsg
