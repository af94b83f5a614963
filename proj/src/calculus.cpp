#include "ncsg/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace ncsg {

double SectorFunction::sup_norm_estimate(double eps_frac, int rays, int radii, double rmin,
                                         double rmax) const {
  const double amax = angle * (1.0 - eps_frac);
  double sup = 0.0;
  for (int a = 0; a < rays; ++a) {
    const double ang = rays == 1 ? 0.0 : -amax + 2.0 * amax * a / (rays - 1);
    for (int r = 0; r < radii; ++r) {
      const double rad =
          rmin * std::pow(rmax / rmin, radii == 1 ? 0.0 : double(r) / (radii - 1));
      sup = std::max(sup, std::abs(eval(std::polar(rad, ang))));
    }
  }
  return sup;
}

SectorFunction SectorFunction::constant(Complex c) {
  SectorFunction f;
  f.name = "constant";
  f.angle = kPi;
  f.eval = [c](Complex) { return c; };
  f.zero_limit = c;
  return f;
}

SectorFunction SectorFunction::imaginary_power(double u) {
  SectorFunction f;
  f.name = "imaginary_power";
  f.angle = kPi;
  f.eval = [u](Complex z) {
    return std::exp(Complex(-u * std::arg(z), u * std::log(std::abs(z))));
  };
  return f;
}

SectorFunction SectorFunction::heat(double t) {
  SectorFunction f;
  f.name = "heat";
  f.angle = kPi / 2;
  f.eval = [t](Complex z) { return std::exp(-t * z); };
  f.zero_limit = Complex(1.0, 0.0);
  return f;
}

SectorFunction SectorFunction::m_theta_family(double theta) {
  SectorFunction f;
  f.name = "m_theta";
  f.angle = kPi / 2 - std::abs(theta);
  if (f.angle <= 0.0) f.angle = 1e-9;
  f.eval = [theta](Complex z) {
    if (z == Complex(0.0)) return kMThetaZeroLimit;
    const Complex phase(std::cos(theta), std::sin(theta));
    return std::exp(-phase * z) - (1.0 - std::exp(-z)) / z;
  };
  f.zero_limit = kMThetaZeroLimit;
  return f;
}

SectorFunction SectorFunction::m_theta_scaled(double t, double theta) {
  SectorFunction f = m_theta_family(theta);
  f.name = "m_theta_scaled";
  auto base = f.eval;
  f.eval = [base, t](Complex z) { return base(t * z); };
  return f;
}

SectorFunction SectorFunction::rational(double a) {
  if (!(a > 0)) throw std::domain_error("rational sector function needs a > 0");
  SectorFunction f;
  f.name = "rational";
  f.angle = 3 * kPi / 4;
  f.eval = [a](Complex z) { return z / (z + a); };
  f.zero_limit = Complex(0.0, 0.0);
  return f;
}

SectorFunction SectorFunction::ergodic_average_symbol(double t) {
  if (!(t > 0)) throw std::domain_error("ergodic symbol needs t > 0");
  SectorFunction f;
  f.name = "ergodic";
  f.angle = kPi / 2;
  f.eval = [t](Complex z) {
    const Complex s = t * z;
    if (std::abs(s) < 1e-8) return 1.0 - s / 2.0 + s * s / 6.0;
    return (1.0 - std::exp(-s)) / s;
  };
  f.zero_limit = Complex(1.0, 0.0);
  return f;
}

SectorFunction SectorFunction::product(const SectorFunction& f, const SectorFunction& g) {
  SectorFunction h;
  h.name = f.name + "*" + g.name;
  h.angle = std::min(f.angle, g.angle);
  auto fe = f.eval, ge = g.eval;
  h.eval = [fe, ge](Complex z) { return fe(z) * ge(z); };
  if (f.zero_limit && g.zero_limit) h.zero_limit = *f.zero_limit * *g.zero_limit;
  return h;
}

SectorFunction SectorFunction::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto param = [&](double fallback) {
    if (tail.empty()) return fallback;
    return std::stod(tail);
  };
  if (head == "imaginary_power") return imaginary_power(param(1.0));
  if (head == "heat") return heat(param(1.0));
  if (head == "m_theta") return m_theta_family(param(0.0));
  if (head == "rational") return rational(param(1.0));
  if (head == "ergodic") return ergodic_average_symbol(param(1.0));
  if (head == "constant") return constant(Complex(param(1.0), 0.0));
  throw std::invalid_argument("unknown sector function: " + text);
}

std::vector<std::string> SectorFunction::builtin_catalog() {
  return {"constant:c", "ergodic:t", "heat:t", "imaginary_power:u", "m_theta:theta",
          "rational:a"};
}

// ---------------------------------------------------------------------------

Complex m_theta(double lambda, double theta) {
  if (!(lambda > 0)) throw std::domain_error("m_theta requires lambda > 0");
  if (std::abs(theta) > kPi / 2 + 1e-15)
    throw std::domain_error("m_theta requires |theta| <= pi/2");
  const Complex phase(std::cos(theta), std::sin(theta));
  // (1 - e^{-lambda})/lambda via expm1 for stability near 0
  const double avg = -std::expm1(-lambda) / lambda;
  return std::exp(-phase * lambda) - avg;
}

namespace {

// Lanczos coefficients (Godfrey), g = 607/128, ~1e-14 relative accuracy.
constexpr double kLanczosG = 607.0 / 128.0;
constexpr double kLanczos[15] = {
    0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
    14.136097974741747174,      -0.49191381609762019978,   0.33994649984811888699e-4,
    0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
    -0.21026444172410488319e-3, 0.21743961811521264320e-3,  -0.16431810653676389022e-3,
    0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5};

Complex gamma_positive_half(Complex s) {
  // valid for Re s >= 1/2
  const Complex z = s - 1.0;
  Complex sum = kLanczos[0];
  for (int k = 1; k < 15; ++k) sum += kLanczos[k] / (z + double(k));
  const Complex t = z + kLanczosG + 0.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * sum;
}

}  // namespace

Complex gamma_fn(Complex s) {
  if (s.imag() == 0.0 && s.real() <= 0.0 && s.real() == std::floor(s.real()))
    throw std::domain_error("gamma_fn pole at a nonpositive integer");
  if (s.real() >= 0.5) return gamma_positive_half(s);
  // reflection: Gamma(s) Gamma(1-s) = pi / sin(pi s)
  const Complex sinpis = std::sin(kPi * s);
  if (sinpis == Complex(0.0)) throw std::domain_error("gamma_fn pole at a nonpositive integer");
  return kPi / (sinpis * gamma_positive_half(1.0 - s));
}

Complex n_theta_hat(double u, double theta) {
  if (u == 0.0) return Complex(-1.0, -theta);
  const Complex factor = std::exp(Complex(-theta * u, 0.0)) - 1.0 / Complex(1.0, u);
  return factor * gamma_fn(Complex(0.0, -u));
}

// ---------------------------------------------------------------------------

QuadratureSpec QuadratureSpec::adaptive(double theta, double tolerance) {
  if (std::abs(theta) >= kPi / 2)
    throw std::domain_error("adaptive truncation needs |theta| < pi/2");
  const double kappa = kPi / 2 - std::abs(theta);
  const double envelope_k = 10.0;
  double u = std::log(10.0 * envelope_k / (tolerance * kappa)) / kappa;
  QuadratureSpec q;
  q.truncation = std::max(4.0, u);
  q.tolerance = tolerance;
  return q;
}

namespace {

// composite Gauss-Legendre over [-U, U] with ~unit-width panels
Complex integrate_panels(const std::function<Complex(double)>& f, double U, int nodes_per_unit) {
  const int panels = std::max(2, static_cast<int>(std::ceil(2.0 * U)));
  const auto [gx, gw] = gauss_legendre(std::max(2, nodes_per_unit));
  Complex acc = 0.0;
  const double h = 2.0 * U / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = -U + p * h;
    const double mid = a + h / 2, half = h / 2;
    for (std::size_t i = 0; i < gx.size(); ++i) acc += gw[i] * half * f(mid + half * gx[i]);
  }
  return acc;
}

}  // namespace

MellinResult mellin_reconstruct(double t, double lambda, double theta,
                                const QuadratureSpec& quad) {
  if (!(t > 0) || !(lambda > 0))
    throw std::domain_error("mellin_reconstruct requires t, lambda > 0");
  if (std::abs(theta) >= kPi / 2)
    throw std::domain_error("mellin_reconstruct requires |theta| < pi/2 (integrand must decay)");
  const double logtl = std::log(t * lambda);
  auto integrand = [theta, logtl](double u) {
    return n_theta_hat(u, theta) * std::exp(Complex(0.0, u * logtl));
  };
  const double U = quad.truncation;
  const Complex coarse = integrate_panels(integrand, U, quad.nodes_per_unit) / (2.0 * kPi);
  const Complex fine = integrate_panels(integrand, 2.0 * U, 2 * quad.nodes_per_unit) / (2.0 * kPi);
  return {fine, std::abs(fine - coarse), U};
}

double ergodic_symbol(double t, double lambda) {
  if (!(t > 0)) throw std::domain_error("ergodic_symbol requires t > 0");
  if (lambda < 0) throw std::domain_error("ergodic_symbol requires lambda >= 0");
  const double s = t * lambda;
  if (s == 0.0) return 1.0;
  return -std::expm1(-s) / s;
}

HMReport hm_condition_check(const SectorFunction& m, const std::vector<double>& v_grid) {
  HMReport rep;
  for (double v0 : v_grid)
    for (double v : {v0, -v0}) {
      if (v == 0.0) continue;
      const Complex mv = m(Complex(0.0, v));
      rep.sup_m = std::max(rep.sup_m, std::abs(mv));
      const double h = 1e-6 * std::abs(v);
      const Complex dm = (m(Complex(0.0, v + h)) - m(Complex(0.0, v - h))) / (2.0 * h);
      rep.sup_v_dm = std::max(rep.sup_v_dm, std::abs(v * dm));
    }
  if (m.angle > kPi / 2) {
    rep.cauchy_bound = m.sup_norm_estimate() / std::sin(m.angle - kPi / 2);
    rep.within_cauchy = rep.sup_v_dm <= *rep.cauchy_bound * (1.0 + 1e-6) + 1e-12;
  }
  return rep;
}

EnvelopeResult envelope_constant(double p, double psi, double power_index) {
  if (!(p > 1.0) || std::isinf(p)) throw std::domain_error("envelope_constant requires 1 < p < inf");
  const double delta = std::abs(1.0 / p - 0.5);
  const double kappa = kPi / 2 - psi - kPi * delta;
  if (!(kappa > 0)) return {false, kInf};
  const double lead = p * p / (p - 1.0);
  auto integrand = [&](double u) {
    return std::pow(1.0 + std::pow(u, power_index), delta) * std::exp(-kappa * u);
  };
  // upper limit where the integrand falls below 1e-18
  double U = 45.0 / kappa;
  for (int it = 0; it < 4; ++it)
    U = (45.0 + delta * power_index * std::log1p(U)) / kappa;
  const auto [gx, gw] = gauss_legendre(16);
  double prev = 0.0, value = 0.0;
  for (int panels = 64;; panels *= 2) {
    double acc = 0.0;
    const double h = U / panels;
    for (int q = 0; q < panels; ++q) {
      const double mid = q * h + h / 2, half = h / 2;
      for (std::size_t i = 0; i < gx.size(); ++i)
        acc += gw[i] * half * integrand(mid + half * gx[i]);
    }
    value = lead * acc / kPi;  // (1/2pi) * 2 * int_0^inf by symmetry
    if (panels > 64 && std::abs(value - prev) <= 1e-10 * (1.0 + std::abs(value))) break;
    if (panels > 4096) break;
    prev = value;
  }
  return {true, value};
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kKernelOverlapTol = 1e-10;

void require_kernel_free(const SpectralDecomposition& dec, const AlgebraElement& x,
                         const char* what) {
  const double mass = dec.kernel_mass(x);
  const double scale = 1.0 + x.to_gns().norm();
  if (mass > kKernelOverlapTol * scale)
    throw std::domain_error(std::string(what) +
                            ": x overlaps ker L and the symbol has no declared value at 0");
}

}  // namespace

AlgebraElement apply_multiplier(const SpectralDecomposition& dec, const SectorFunction& m,
                                const AlgebraElement& x) {
  std::optional<Complex> kv;
  if (m.zero_limit)
    kv = *m.zero_limit;
  else {
    require_kernel_free(dec, x, "apply_multiplier");
    kv = Complex(0.0, 0.0);  // drop numerical kernel dust
  }
  return dec.apply_symbol([&m](double lam) { return m.at_real(lam); }, x, kv);
}

Superoperator multiplier_superoperator(const SpectralDecomposition& dec,
                                       const SectorFunction& m) {
  const Complex kv = m.zero_limit ? *m.zero_limit : Complex(0.0, 0.0);
  return Superoperator(dec.algebra(),
                       dec.symbol_matrix([&m](double lam) { return m.at_real(lam); }, kv));
}

AlgebraElement imaginary_power(const SpectralDecomposition& dec, double u,
                               const AlgebraElement& x) {
  require_kernel_free(dec, x, "imaginary_power");
  return dec.apply_symbol(
      [u](double lam) { return std::exp(Complex(0.0, u * std::log(lam))); }, x,
      Complex(0.0, 0.0));
}

AlgebraElement apply_Tz(const SpectralDecomposition& dec, Complex z, const AlgebraElement& x) {
  if (z.real() < 0) throw std::domain_error("apply_Tz requires Re z >= 0");
  return dec.apply_symbol([z](double lam) { return std::exp(-z * lam); }, x);
}

}  // namespace ncsg
