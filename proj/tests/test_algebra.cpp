#include "doctest.h"
#include "ncsg/algebra.hpp"

using namespace ncsg;

namespace {

AlgebraElement from_rows(const AlgebraPtr& alg, std::initializer_list<Complex> entries) {
  AlgebraElement x(alg);
  const int n = alg->block_dim(0);
  auto it = entries.begin();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x.block(0)(i, j) = *it++;
  return x;
}

}  // namespace

TEST_CASE("trace normalization and basic examples") {
  const auto m3 = TracialAlgebra::full_matrix(3);
  CHECK(trace(AlgebraElement::identity(m3)).real() == doctest::Approx(1.0).epsilon(1e-14));

  const auto m2 = TracialAlgebra::full_matrix(2);
  const auto diag20 = AlgebraElement::diagonal(m2, {2.0, 0.0});
  CHECK(trace(diag20).real() == doctest::Approx(1.0).epsilon(1e-14));

  const auto nilpotent = from_rows(m2, {0, 1, 0, 0});
  CHECK(std::abs(trace(nilpotent)) <= 1e-15);
}

TEST_CASE("trace is faithful and normalized by construction") {
  CHECK_THROWS_AS(TracialAlgebra::block_diagonal({2}, {0.5}), std::invalid_argument);
  CHECK_THROWS_AS(TracialAlgebra::commutative({0.5, 0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(TracialAlgebra::block_diagonal({2, 2}, {0.5}), std::invalid_argument);
}

TEST_CASE("lp_norm examples") {
  const auto m2 = TracialAlgebra::full_matrix(2);
  const auto one = AlgebraElement::identity(m2);
  for (double p : {1.0, 1.5, 2.0, 7.0})
    CHECK(lp_norm(one, p) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lp_norm(one, kInf) == doctest::Approx(1.0).epsilon(1e-14));

  const auto diag20 = AlgebraElement::diagonal(m2, {2.0, 0.0});
  CHECK(lp_norm(diag20, 1.0) == doctest::Approx(1.0).epsilon(1e-14));

  const auto nilpotent = from_rows(m2, {0, 1, 0, 0});
  CHECK(lp_norm(nilpotent, 2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));

  CHECK_THROWS_AS(lp_norm(one, 0.7), std::domain_error);
}

TEST_CASE("modulus examples") {
  const auto m2 = TracialAlgebra::full_matrix(2);
  const auto x = from_rows(m2, {0, 2, 0, 0});
  const auto mod = modulus(x);
  CHECK(mod.block(0)(0, 0).real() == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(mod.block(0)(1, 1).real() == doctest::Approx(2.0).epsilon(1e-13));

  const auto pos = random_element(m2, 5, RandomKind::positive);
  CHECK((modulus(pos) - pos).max_abs_entry() <= 1e-12 * (1.0 + pos.max_abs_entry()));

  // unitary -> identity
  AlgebraElement u(m2);
  u.block(0) << Complex(0, 1), 0, 0, Complex(std::sqrt(0.5), -std::sqrt(0.5));
  CHECK((modulus(u) - AlgebraElement::identity(m2)).max_abs_entry() <= 1e-13);
}

TEST_CASE("spectral projections select eigenvalues") {
  const auto m2 = TracialAlgebra::full_matrix(2);
  const auto x = AlgebraElement::diagonal(m2, {1.0, 3.0});
  const auto p = spectral_projection(x, 0.0, 2.0);
  CHECK(p.element().block(0)(0, 0).real() == doctest::Approx(1.0));
  CHECK(std::abs(p.element().block(0)(1, 1)) <= 1e-14);
  CHECK(p.trace_value() == doctest::Approx(0.5));

  const auto full = spectral_projection(x, 0.0, 5.0);
  CHECK((full.element() - AlgebraElement::identity(m2)).max_abs_entry() <= 1e-14);

  const auto empty = spectral_projection(x, 10.0, 20.0);
  CHECK(empty.element().max_abs_entry() <= 1e-14);
  CHECK(empty.complement_trace() == doctest::Approx(1.0));

  const auto nonsa = from_rows(m2, {0, 1, 0, 0});
  CHECK_THROWS_AS(spectral_projection(nonsa, 0.0, 1.0), std::domain_error);
}

TEST_CASE("random elements satisfy their structural constraints") {
  const auto alg = TracialAlgebra::block_diagonal({2, 3}, {0.4, 0.6});
  const auto sa = random_element(alg, 11, RandomKind::selfadjoint);
  CHECK(sa.hermiticity_residual() <= 1e-15 * (1.0 + sa.max_abs_entry()));
  const auto pos = random_element(alg, 12, RandomKind::positive);
  CHECK(pos.min_eigenvalue() >= -1e-12);
  const auto tl = random_element(alg, 13, RandomKind::traceless);
  CHECK(std::abs(trace(tl)) <= 1e-14);
  // determinism
  const auto again = random_element(alg, 11, RandomKind::selfadjoint);
  CHECK((sa - again).max_abs_entry() == 0.0);
}

TEST_CASE("Hoelder duality and norm monotonicity on random pairs") {
  const auto alg = TracialAlgebra::block_diagonal({3, 2}, {0.7, 0.3});
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_element(alg, rng, RandomKind::general);
    const auto y = random_element(alg, rng, RandomKind::general);
    for (double p : {1.0, 1.5, 2.0, 4.0}) {
      const double q = p == 1.0 ? kInf : p / (p - 1.0);
      CHECK(std::abs(trace(x * y)) <= lp_norm(x, p) * lp_norm(y, q) * (1.0 + 1e-12));
    }
    double prev = lp_norm(x, 1.0);
    for (double p : {1.3, 2.0, 3.0, 8.0}) {
      const double cur = lp_norm(x, p);
      CHECK(prev <= cur * (1.0 + 1e-12));
      prev = cur;
    }
    CHECK(prev <= lp_norm(x, kInf) * (1.0 + 1e-12));
  }
}

TEST_CASE("GNS consistency: ||x||_2^2 = tau(x* x) and coordinates are isometric") {
  const auto alg = TracialAlgebra::block_diagonal({2, 2, 1}, {0.25, 0.5, 0.25});
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = random_element(alg, rng, RandomKind::general);
    const double n2 = lp_norm(x, 2.0);
    CHECK(n2 * n2 == doctest::Approx(trace(x.adjoint() * x).real()).epsilon(1e-12));
    CHECK(n2 == doctest::Approx(x.to_gns().norm()).epsilon(1e-12));
    const auto back = AlgebraElement::from_gns(alg, x.to_gns());
    CHECK((back - x).max_abs_entry() <= 1e-13 * (1.0 + x.max_abs_entry()));
  }
}

TEST_CASE("commutative reduction: lp_norm equals the weighted ell_p norm") {
  const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
  const auto alg = TracialAlgebra::commutative(w);
  const std::vector<Complex> f{Complex(1, 1), Complex(-2, 0), Complex(0, 3), Complex(0.5, 0)};
  const auto x = AlgebraElement::diagonal(alg, f);
  for (double p : {1.0, 2.0, 3.7}) {
    double expect = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) expect += w[i] * std::pow(std::abs(f[i]), p);
    expect = std::pow(expect, 1.0 / p);
    CHECK(lp_norm(x, p) == doctest::Approx(expect).epsilon(1e-14));
  }
  double emax = 0.0;
  for (const auto& v : f) emax = std::max(emax, std::abs(v));
  CHECK(lp_norm(x, kInf) == doctest::Approx(emax).epsilon(1e-14));
}

TEST_CASE("adjoint is an involution and block sparsity is structural") {
  const auto alg = TracialAlgebra::block_diagonal({2, 3}, {0.5, 0.5});
  const auto x = random_element(alg, 41, RandomKind::general);
  CHECK((x.adjoint().adjoint() - x).max_abs_entry() == 0.0);
  CHECK(x.block(0).rows() == 2);
  CHECK(x.block(1).rows() == 3);
}

TEST_CASE("algebra and element JSON round-trips") {
  const auto alg = TracialAlgebra::block_diagonal({2, 1}, {0.75, 0.25});
  const auto back = TracialAlgebra::from_json(alg->to_json());
  CHECK(back->same_as(*alg));
  const auto x = random_element(alg, 51, RandomKind::general);
  const auto xb = AlgebraElement::from_json(alg, x.to_json());
  CHECK((xb - x).max_abs_entry() == 0.0);
}

TEST_CASE("tensor products multiply traces") {
  const auto a = TracialAlgebra::full_matrix(2);
  const auto b = TracialAlgebra::commutative({0.25, 0.75});
  const auto prod = TracialAlgebra::tensor_product(a, b);
  CHECK(prod->block_count() == 2);
  CHECK(prod->block_dim(0) == 2);
  Rng rng(61);
  const auto x = random_element(a, rng, RandomKind::general);
  const auto y = random_element(b, rng, RandomKind::general);
  const auto xy = tensor_element(prod, x, y);
  CHECK(std::abs(trace(xy) - trace(x) * trace(y)) <= 1e-13);
  CHECK(lp_norm(xy, 2.0) ==
        doctest::Approx(lp_norm(x, 2.0) * lp_norm(y, 2.0)).epsilon(1e-12));
}

TEST_CASE("polar decomposition reconstructs x") {
  const auto alg = TracialAlgebra::full_matrix(3);
  const auto x = random_element(alg, 71, RandomKind::general);
  const auto [u, mod] = polar_decompose(x);
  CHECK((u * mod - x).max_abs_entry() <= 1e-12 * (1.0 + x.max_abs_entry()));
  CHECK(lp_norm(u, kInf) <= 1.0 + 1e-12);
}
