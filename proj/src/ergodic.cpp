#include "ncsg/ergodic.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

namespace ncsg {

AlgebraElement ergodic_average(const SpectralDecomposition& dec, const AlgebraElement& x,
                               double t) {
  if (!(t > 0)) throw std::domain_error("ergodic_average requires t > 0");
  return dec.apply_symbol([t](double lam) { return Complex(ergodic_symbol(t, lam)); }, x);
}

double decomposition_check(const SpectralDecomposition& dec, const AlgebraElement& x, double t,
                           double theta) {
  if (!(t > 0)) throw std::domain_error("decomposition_check requires t > 0");
  if (std::abs(theta) > kPi / 2 + 1e-15)
    throw std::domain_error("decomposition_check requires |theta| <= pi/2");
  const Complex z = std::polar(t, theta);
  const AlgebraElement lhs = apply_Tz(dec, z, x);
  const AlgebraElement mpart =
      apply_multiplier(dec, SectorFunction::m_theta_scaled(t, theta), x);
  const AlgebraElement apart = ergodic_average(dec, x, t);
  return lp_norm(lhs - mpart - apart, 2.0);
}

// ---------------------------------------------------------------------------

namespace {

// composite Gauss-Legendre of a GnsVector-valued integrand
GnsVector integrate_vector(const std::function<GnsVector(double)>& f, double a, double b,
                           int panels, int nodes, bool geometric) {
  const auto [gx, gw] = gauss_legendre(nodes);
  GnsVector acc;
  bool first = true;
  for (int p = 0; p < panels; ++p) {
    double lo, hi;
    if (geometric) {
      const double ratio = b / a;
      lo = a * std::pow(ratio, double(p) / panels);
      hi = a * std::pow(ratio, double(p + 1) / panels);
    } else {
      lo = a + (b - a) * p / panels;
      hi = a + (b - a) * (p + 1) / panels;
    }
    const double mid = (lo + hi) / 2, half = (hi - lo) / 2;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      GnsVector term = gw[i] * half * f(mid + half * gx[i]);
      if (first) {
        acc = term;
        first = false;
      } else {
        acc += term;
      }
    }
  }
  return acc;
}

}  // namespace

ContourResult contour_Tz(const SpectralDecomposition& dec, Complex z, const AlgebraElement& x,
                         const ContourSpec& spec) {
  if (!(z.real() > 0)) throw std::domain_error("contour_Tz requires Re z > 0");
  const double argz = std::arg(z);
  if (dec.kernel_mass(x) > 1e-10 * (1.0 + x.to_gns().norm()))
    throw std::domain_error("contour_Tz requires x in (ker L)^perp (resolvent pole at 0)");

  const double gap = dec.gap();
  double phi = spec.angle;
  if (phi <= 0.0) phi = std::min(kPi / 3, 0.5 * (kPi / 2 - std::abs(argz)));
  if (!(phi > 0) || std::abs(argz) + phi >= kPi / 2)
    throw ValidationError("contour rays do not keep e^{-z lambda} decaying");
  double r0 = spec.inner_radius;
  if (r0 <= 0.0) r0 = gap / 2;
  if (r0 >= gap) throw ValidationError("contour intersects the spectrum");

  const double cmin = std::min(std::cos(argz + phi), std::cos(argz - phi));
  const double rmax = std::max(2.0 * r0, 40.0 / (std::abs(z) * cmin));

  const GnsVector xi = x.to_gns();
  const int d = static_cast<int>(xi.size());

  // rebuild L from the clusters: exact on the decomposition's invariant data
  Matrix lmat = Matrix::Zero(d, d);
  for (int k = 0; k < dec.cluster_count(); ++k) lmat += dec.eigenvalue(k) * dec.projection(k);

  auto resolvent_apply = [&](Complex lam) -> GnsVector {
    Matrix m = -lmat;
    m.diagonal().array() += lam;
    return m.partialPivLu().solve(xi);
  };

  const Complex up = std::polar(1.0, phi), down = std::polar(1.0, -phi);
  auto ray_integrand = [&](Complex dir) {
    return [&, dir](double r) -> GnsVector {
      const Complex lam = r * dir;
      return std::exp(-z * lam) * dir * resolvent_apply(lam);
    };
  };
  // counterclockwise boundary of {r0 < |lambda|, |arg lambda| < phi}:
  // lower ray outward, upper ray inward, inner arc from +phi to -phi
  GnsVector total = integrate_vector(ray_integrand(down), r0, rmax, spec.panels_per_ray,
                                     spec.nodes_per_panel, true);
  total -= integrate_vector(ray_integrand(up), r0, rmax, spec.panels_per_ray,
                            spec.nodes_per_panel, true);
  total -= integrate_vector(
      [&](double th) -> GnsVector {
        const Complex lam = std::polar(r0, th);
        return std::exp(-z * lam) * Complex(0.0, 1.0) * lam * resolvent_apply(lam);
      },
      -phi, phi, spec.arc_panels, spec.nodes_per_panel, false);
  total /= Complex(0.0, 2.0 * kPi);

  ContourResult out{AlgebraElement::from_gns(dec.algebra(), total), 0.0};
  out.residual = lp_norm(out.value - apply_Tz(dec, z, x), 2.0);
  return out;
}

std::pair<AlgebraElement, AlgebraElement> splitting(const SpectralDecomposition& dec,
                                                    const AlgebraElement& x) {
  const AlgebraElement fixed = fixed_point_projection(dec, x);
  return {fixed, x - fixed};
}

namespace {

double fit_log_slope(const std::vector<DecayRow>& rows) {
  // least squares of log(norm) against log|z| over nondegenerate entries
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (!(r.norm > 1e-14)) continue;
    const double lx = std::log(std::abs(r.z)), ly = std::log(r.norm);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  return denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

}  // namespace

WitnessResult witness_projection(const SpectralDecomposition& dec, const AlgebraElement& x,
                                 double epsilon, const std::vector<Complex>& z_grid,
                                 WitnessMode mode, ErgodicTarget target) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::domain_error("witness_projection requires epsilon in (0,1)");
  if (z_grid.empty()) throw std::invalid_argument("witness grid must be nonempty");

  const AlgebraElement fixed = fixed_point_projection(dec, x);
  const AlgebraElement range_part = x - fixed;
  const AlgebraElement& base =
      target == ErgodicTarget::fixed_point_limit ? range_part : x;

  // disc around the geometric mid of the grid radii, inside the right half-plane
  double rmin = kInf, rmax_ = 0.0;
  for (Complex zz : z_grid) {
    rmin = std::min(rmin, std::abs(zz));
    rmax_ = std::max(rmax_, std::abs(zz));
  }
  const double s0 = std::sqrt(rmin * rmax_);
  const double radius = 0.6 * s0;
  const int samples = 64;
  AlgebraElement a(dec.algebra());
  for (int j = 0; j < samples; ++j) {
    const Complex zeta = s0 + std::polar(radius, 2.0 * kPi * j / samples);
    const AlgebraElement tz = apply_Tz(dec, zeta, base);
    a += tz.adjoint() * tz;
  }
  a *= Complex(1.0 / samples, 0.0);

  const AlgebraElement root = pos_power(a, 0.5);
  const double cutoff = lp_norm(root, 2.0) / std::sqrt(epsilon);
  WitnessResult out{spectral_projection(root, 0.0, cutoff), 0.0, {}, 0.0};
  out.complement_trace = out.witness.complement_trace();

  const AlgebraElement& e = out.witness.element();
  const AlgebraElement tgt = target == ErgodicTarget::identity_limit ? x : fixed;
  for (Complex zz : z_grid) {
    const AlgebraElement diff = apply_Tz(dec, zz, x) - tgt;
    const AlgebraElement compressed =
        mode == WitnessMode::bilateral ? e * diff * e : diff * e;
    out.decay.push_back({zz, lp_norm(compressed, kInf)});
  }
  out.fitted_rate = fit_log_slope(out.decay);
  return out;
}

nlohmann::json ConvergenceReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"abs_z", std::abs(r.z)}, {"arg_z", std::arg(r.z)}, {"norm", r.norm}});
  return {{"target", target}, {"fitted_rate", fitted_rate}, {"rows", rows_json}};
}

ConvergenceReport convergence_report(const SpectralDecomposition& dec, const AlgebraElement& x,
                                     const std::vector<Complex>& z_grid, double p,
                                     ErgodicTarget target) {
  ConvergenceReport rep;
  rep.target = target == ErgodicTarget::identity_limit ? "x" : "P(x)";
  const AlgebraElement tgt =
      target == ErgodicTarget::identity_limit ? x : fixed_point_projection(dec, x);
  for (Complex zz : z_grid)
    rep.rows.push_back({zz, lp_norm(apply_Tz(dec, zz, x) - tgt, p)});
  rep.fitted_rate = fit_log_slope(rep.rows);
  return rep;
}

}  // namespace ncsg
