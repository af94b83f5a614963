#include <algorithm>

#include "doctest.h"
#include "ncsg/calculus.hpp"

using namespace ncsg;

namespace {

SpectralDecomposition schur_dec(std::vector<std::vector<double>> vecs) {
  auto spec = GeneratorSpec::schur(std::move(vecs));
  return eigendecompose(build_generator(spec, spec.natural_algebra()));
}

}  // namespace

TEST_CASE("m_theta frozen values") {
  // direct evaluations of exp(-e^{i theta} lambda) - (1-e^{-lambda})/lambda
  CHECK(m_theta(1.0, 0.0).real() == doctest::Approx(-0.26424111765711536).epsilon(1e-13));
  CHECK(std::abs(m_theta(1.0, 0.0).imag()) <= 1e-16);
  const Complex v = m_theta(1.0, kPi / 2);
  CHECK(v.real() == doctest::Approx(-0.09181825296041796).epsilon(1e-12));
  CHECK(v.imag() == doctest::Approx(-0.8414709848078965).epsilon(1e-12));
  // limit at 0 is the documented constant
  CHECK(std::abs(m_theta(1e-9, 0.3)) <= 1e-8);
  CHECK(kMThetaZeroLimit == Complex(0.0, 0.0));
  CHECK_THROWS_AS(m_theta(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(m_theta(-1.0, 0.0), std::domain_error);
}

TEST_CASE("gamma function: factorials, conjugation, modulus identity") {
  double fact = 1.0;
  for (int n = 1; n <= 12; ++n) {
    if (n > 1) fact *= (n - 1);
    CHECK(std::abs(gamma_fn(Complex(n, 0)) - Complex(fact, 0)) <= 1e-12 * fact);
  }
  // |Gamma(it)|^2 = pi / (t sinh(pi t)), checked as an independent identity
  for (double t : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const double lhs = std::norm(gamma_fn(Complex(0.0, t)));
    const double rhs = kPi / (t * std::sinh(kPi * t));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
  CHECK(std::abs(gamma_fn(Complex(0.0, -1.0))) ==
        doctest::Approx(0.5215640468649398).epsilon(1e-12));
  // Schwarz reflection on random samples
  Rng rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    const Complex s(4.0 * rng.uniform() - 1.5, 6.0 * rng.uniform() - 3.0);
    const Complex a = gamma_fn(std::conj(s));
    const Complex b = std::conj(gamma_fn(s));
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  }
  CHECK_THROWS_AS(gamma_fn(Complex(0.0, 0.0)), std::domain_error);
  CHECK_THROWS_AS(gamma_fn(Complex(-3.0, 0.0)), std::domain_error);
}

TEST_CASE("n_theta_hat: removable singularity and frozen modulus") {
  for (double theta : {0.0, 0.3, -1.2}) {
    CHECK(std::abs(n_theta_hat(0.0, theta) - Complex(-1.0, -theta)) <= 1e-15);
    // numerical limit from both sides
    CHECK(std::abs(n_theta_hat(1e-6, theta) - Complex(-1.0, -theta)) <= 1e-5);
    CHECK(std::abs(n_theta_hat(-1e-6, theta) - Complex(-1.0, -theta)) <= 1e-5);
  }
  CHECK(std::abs(n_theta_hat(1.0, 0.0)) ==
        doctest::Approx(0.3688014743612972).epsilon(1e-12));
}

TEST_CASE("boundary envelope: |n_theta_hat(u)| <= K exp((|theta|-pi/2)|u|), K <= 10") {
  double k_fit = 0.0;
  for (double theta : {0.0, 0.2 * kPi / 2, 0.4 * kPi / 2, 0.45 * kPi}) {
    for (int i = 0; i <= 1200; ++i) {
      const double u = -30.0 + 60.0 * i / 1200.0;
      const double envelope = std::exp((std::abs(theta) - kPi / 2) * std::abs(u));
      k_fit = std::max(k_fit, std::abs(n_theta_hat(u, theta)) / envelope);
    }
  }
  CHECK(k_fit <= 10.0);
  CHECK(k_fit >= 1.0);  // the bound is not vacuous
}

TEST_CASE("Mellin reconstruction matches m_theta through the independent path") {
  {
    const auto quad = QuadratureSpec::adaptive(0.0, 1e-8);
    const MellinResult r = mellin_reconstruct(1.0, 1.0, 0.0, quad);
    CHECK(std::abs(r.value - m_theta(1.0, 0.0)) <= 1e-6);
    CHECK(std::abs(r.value - Complex(-0.26424111765711536, 0.0)) <= 1e-6);
  }
  for (double tl : {0.1, 10.0}) {
    const auto quad = QuadratureSpec::adaptive(0.3, 1e-8);
    const MellinResult r = mellin_reconstruct(tl, 1.0, 0.3, quad);
    CHECK(std::abs(r.value - m_theta(tl, 0.3)) <= 1e-4);
  }
  {  // adaptivity certificate: residual against doubled (U, nodes) is tiny
    const auto quad = QuadratureSpec::adaptive(0.2, 1e-8);
    const MellinResult r = mellin_reconstruct(2.0, 1.5, 0.2, quad);
    CHECK(r.residual <= 1e-8);
  }
  CHECK_THROWS_AS(mellin_reconstruct(1.0, 1.0, kPi / 2, QuadratureSpec{}), std::domain_error);
}

TEST_CASE("ergodic symbol values") {
  CHECK(ergodic_symbol(1.0, 0.0) == 1.0);
  CHECK(ergodic_symbol(1.0, 1.0) == doctest::Approx(0.6321205588285577).epsilon(1e-14));
  CHECK(ergodic_symbol(1e4, 10.0) <= 1e-4);
  CHECK(ergodic_symbol(1.0, 1e-14) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(ergodic_symbol(0.0, 1.0), std::domain_error);
}

TEST_CASE("apply_multiplier: identity symbol, heat consistency, kernel handling") {
  const auto dec = schur_dec({{0}, {1}, {2}});
  const auto alg = dec.algebra();
  Rng rng(7);
  auto x = random_element(alg, rng, RandomKind::general);
  x -= fixed_point_projection(dec, x);

  CHECK((apply_multiplier(dec, SectorFunction::constant(1.0), x) - x).max_abs_entry() <= 1e-12);

  const double t = 0.6;
  const auto via_m = apply_multiplier(dec, SectorFunction::heat(t), x);
  CHECK((via_m - apply_Tt(dec, x, t)).max_abs_entry() <= 1e-12);

  // kernel overlap without a declared limit is an error
  const auto one = AlgebraElement::identity(alg);
  CHECK_THROWS_AS(apply_multiplier(dec, SectorFunction::imaginary_power(1.0), one),
                  std::domain_error);
  // with a declared limit the kernel passes through it
  const auto through = apply_multiplier(dec, SectorFunction::ergodic_average_symbol(1.0), one);
  CHECK((through - one).max_abs_entry() <= 1e-12);
}

TEST_CASE("single-eigenvalue multiplier: lambda/(1+lambda) on depolarizing") {
  const auto alg = TracialAlgebra::full_matrix(2);
  const auto dec = eigendecompose(build_generator(GeneratorSpec::depolarizing(1.0), alg));
  const auto x = random_element(alg, 9, RandomKind::traceless);
  const auto y = apply_multiplier(dec, SectorFunction::rational(1.0), x);
  CHECK((y - Complex(0.5, 0.0) * x).max_abs_entry() <= 1e-12);
}

TEST_CASE("imaginary powers: unitarity, group law, spectral action") {
  const auto dec = schur_dec({{0}, {1}, {2}});
  const auto alg = dec.algebra();
  Rng rng(11);
  auto x = random_element(alg, rng, RandomKind::general);
  x -= fixed_point_projection(dec, x);

  CHECK((imaginary_power(dec, 0.0, x) - x).max_abs_entry() <= 1e-12);

  for (double u : {-10.0, -1.5, 0.3, 10.0})
    CHECK(lp_norm(imaginary_power(dec, u, x), 2.0) ==
          doctest::Approx(lp_norm(x, 2.0)).epsilon(1e-10));

  const auto ab = imaginary_power(dec, 0.7, imaginary_power(dec, -2.2, x));
  CHECK((ab - imaginary_power(dec, -1.5, x)).max_abs_entry() <= 1e-10);

  // Schur with b=(0,1): the only nonzero eigenvalue is 1, so L^{iu} x = x
  const auto dec2 = schur_dec({{0}, {1}});
  auto y = random_element(dec2.algebra(), rng, RandomKind::general);
  y -= fixed_point_projection(dec2, y);
  CHECK((imaginary_power(dec2, 3.7, y) - y).max_abs_entry() <= 1e-12);

  // eigenvalues {1,4}: the lambda=4 component picks up e^{iu ln 4}
  const double u = 1.3;
  AlgebraElement unit(alg);
  unit.block(0)(0, 2) = 1.0;  // psi(0,2) = 4
  const auto img = imaginary_power(dec, u, unit);
  const Complex expect = std::exp(Complex(0.0, u * std::log(4.0)));
  CHECK(std::abs(img.block(0)(0, 2) - expect) <= 1e-12);
}

TEST_CASE("apply_Tz: real axis, pure imaginary isometry, single eigenvalue") {
  const auto dec = schur_dec({{0}, {1.2}});
  Rng rng(13);
  const auto x = random_element(dec.algebra(), rng, RandomKind::general);
  CHECK((apply_Tz(dec, Complex(0.8, 0.0), x) - apply_Tt(dec, x, 0.8)).max_abs_entry() <= 1e-13);

  auto y = x;
  y -= fixed_point_projection(dec, y);
  CHECK(lp_norm(apply_Tz(dec, Complex(0.0, 2.5), y), 2.0) ==
        doctest::Approx(lp_norm(y, 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(apply_Tz(dec, Complex(-0.1, 0.0), x), std::domain_error);

  const auto alg2 = TracialAlgebra::full_matrix(2);
  const auto dep = eigendecompose(build_generator(GeneratorSpec::depolarizing(1.0), alg2));
  const auto tl = random_element(alg2, 15, RandomKind::traceless);
  const Complex z(1.0, 1.0);
  CHECK((apply_Tz(dep, z, tl) - std::exp(-z) * tl).max_abs_entry() <= 1e-12);
}

TEST_CASE("multiplicativity and L2 contractivity of the calculus") {
  const auto dec = schur_dec({{0}, {0.7}, {1.9}});
  Rng rng(17);
  auto x = random_element(dec.algebra(), rng, RandomKind::general);
  x -= fixed_point_projection(dec, x);
  const auto f = SectorFunction::rational(1.0);
  const auto g = SectorFunction::heat(0.4);
  const auto fg = SectorFunction::product(f, g);
  const auto composed = apply_multiplier(dec, f, apply_multiplier(dec, g, x));
  CHECK((apply_multiplier(dec, fg, x) - composed).max_abs_entry() <= 1e-10);

  // sup over the actual spectrum bounds the L2 action
  double sup_spec = 0.0;
  for (int k = 0; k < dec.cluster_count(); ++k)
    if (k != dec.kernel_index())
      sup_spec = std::max(sup_spec, std::abs(f.at_real(dec.eigenvalue(k))));
  CHECK(lp_norm(apply_multiplier(dec, f, x), 2.0) <= sup_spec * lp_norm(x, 2.0) * (1 + 1e-12));
}

TEST_CASE("Laplace identity: the point-mass-minus-Lebesgue symbol is m_theta") {
  // integral of e^{-lambda u} against (delta at e^{i theta}) minus Lebesgue on
  // [0,1], the [0,1] part through independent Gauss-Legendre quadrature
  const auto [gx, gw] = gauss_legendre(32);
  for (double theta : {0.0, 0.4, -1.1})
    for (double lam : {0.3, 1.0, 7.5}) {
      const Complex point = std::exp(-std::polar(1.0, theta) * lam);
      Complex lebesgue = 0.0;
      for (std::size_t i = 0; i < gx.size(); ++i)
        lebesgue += gw[i] * 0.5 * std::exp(-(0.5 + 0.5 * gx[i]) * lam);
      CHECK(std::abs(point - lebesgue - m_theta(lam, theta)) <= 1e-14);
    }
}

TEST_CASE("Hoermander-Mihlin report for builtin symbols") {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(std::pow(10.0, -3.0 + 6.0 * i / 40.0));

  {  // z^{iu}: |m(iv)| <= e^{pi|u|/2} and |v m'(iv)| <= |u| e^{pi|u|/2}
    const double u = 1.7;
    const auto rep = hm_condition_check(SectorFunction::imaginary_power(u), grid);
    const double cap = std::exp(kPi * u / 2);
    CHECK(rep.sup_m <= cap * (1 + 1e-9));
    CHECK(rep.sup_m >= cap * (1 - 1e-6));  // attained on the negative axis
    CHECK(rep.sup_v_dm <= u * cap * (1 + 1e-5));
  }
  {  // constants have derivative zero
    const auto rep = hm_condition_check(SectorFunction::constant(3.0), grid);
    CHECK(rep.sup_m == doctest::Approx(3.0));
    CHECK(rep.sup_v_dm <= 1e-9);
  }
  {  // z/(1+z) on a 3pi/4 sector: both suprema finite, Cauchy bound respected
    const auto rep = hm_condition_check(SectorFunction::rational(1.0), grid);
    CHECK(std::isfinite(rep.sup_m));
    CHECK(std::isfinite(rep.sup_v_dm));
    REQUIRE(rep.cauchy_bound.has_value());
    CHECK(rep.within_cauchy);
  }
}

TEST_CASE("envelope constant: finiteness region and values") {
  CHECK(envelope_constant(2.0, 0.4 * kPi).finite);
  CHECK(envelope_constant(2.0, 0.49 * kPi).finite);

  // psi >= (1/2 - |1/p-1/2|) pi flips the infinity flag
  const double p = 4.0;
  const double crit = (0.5 - std::abs(1.0 / p - 0.5)) * kPi;
  CHECK_FALSE(envelope_constant(p, crit).finite);
  CHECK_FALSE(envelope_constant(p, crit + 0.1).finite);

  const auto v = envelope_constant(4.0, 0.1 * kPi);
  CHECK(v.finite);
  CHECK(v.value > 0);
  CHECK(std::isfinite(v.value));

  // p = 2: a pure exponential integral, (p^2/(p-1)) / (pi (pi/2 - psi))
  const double psi = 0.3 * kPi;
  const auto c2 = envelope_constant(2.0, psi);
  CHECK(c2.value == doctest::Approx(4.0 / (kPi * (kPi / 2 - psi))).epsilon(1e-9));
}

TEST_CASE("sector function parsing and catalog") {
  const auto f = SectorFunction::parse("imaginary_power:2.5");
  CHECK(f.name == "imaginary_power");
  CHECK(std::abs(f(Complex(1.0, 0.0)) - Complex(1.0, 0.0)) <= 1e-15);
  CHECK_THROWS_AS(SectorFunction::parse("nope:1"), std::invalid_argument);
  const auto catalog = SectorFunction::builtin_catalog();
  CHECK(std::find(catalog.begin(), catalog.end(), "imaginary_power:u") != catalog.end());
  CHECK(std::is_sorted(catalog.begin(), catalog.end()));
}

TEST_CASE("boundedness of builtins along sector rays") {
  for (const char* name : {"heat:1", "m_theta:0.4", "rational:1", "ergodic:2"}) {
    const auto f = SectorFunction::parse(name);
    CHECK(std::isfinite(f.sup_norm_estimate()));
  }
}
