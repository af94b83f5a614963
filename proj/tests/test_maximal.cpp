#include <algorithm>

#include "doctest.h"
#include "ncsg/maximal.hpp"

using namespace ncsg;

namespace {

double classical_sup_norm(const MaximalFamily& fam, double p) {
  // pointwise max of moduli on a commutative algebra, then the weighted p-norm
  const auto& alg = *fam.algebra;
  std::vector<double> sup(alg.block_count(), 0.0);
  for (const auto& x : fam.elements)
    for (int b = 0; b < alg.block_count(); ++b)
      sup[b] = std::max(sup[b], std::abs(x.block(b)(0, 0)));
  if (std::isinf(p)) return *std::max_element(sup.begin(), sup.end());
  double acc = 0.0;
  for (int b = 0; b < alg.block_count(); ++b)
    acc += alg.trace_weight(b) * std::pow(sup[b], p);
  return std::pow(acc, 1.0 / p);
}

void check_certificate(const MaximalFamily& fam, double p, const MajorantCertificate& cert) {
  CHECK(cert.feasibility >= -1e-9);
  CHECK(cert.dual <= cert.primal + 1e-8);
  // primal recomputable from the majorant
  CHECK(lp_norm(cert.majorant, p) == doctest::Approx(cert.primal).epsilon(1e-12));
  // dual constraints: y_i >= 0 and ||sum y_i||_q <= 1
  const double q = p == 1.0 ? kInf : (std::isinf(p) ? 1.0 : p / (p - 1.0));
  AlgebraElement total(fam.algebra);
  double dual = 0.0;
  for (std::size_t i = 0; i < cert.duals.size(); ++i) {
    CHECK(cert.duals[i].min_eigenvalue() >= -1e-10);
    total += cert.duals[i];
    dual += trace(fam.elements[i] * cert.duals[i]).real();
  }
  CHECK(lp_norm(total, q) <= 1.0 + 1e-9);
  CHECK(dual == doctest::Approx(cert.dual).epsilon(1e-9));
}

}  // namespace

TEST_CASE("p = inf closed form: max operator norm") {
  const auto alg = TracialAlgebra::full_matrix(2);
  MaximalFamily fam = MaximalFamily::of({AlgebraElement::diagonal(alg, {1.0, 0.0}),
                                         AlgebraElement::diagonal(alg, {0.0, 2.0})});
  const auto cert = positive_linf_norm(fam, kInf);
  CHECK(cert.primal == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cert.gap <= 1e-10);
  check_certificate(fam, kInf, cert);
}

TEST_CASE("commutative families reduce to the pointwise max") {
  const auto alg = TracialAlgebra::full_matrix(2);
  {  // the spec'd diagonal example at p=1: tau(diag(1,2)) = 1.5
    MaximalFamily fam = MaximalFamily::of({AlgebraElement::diagonal(alg, {1.0, 0.0}),
                                           AlgebraElement::diagonal(alg, {0.0, 2.0})});
    const auto cert = positive_linf_norm(fam, 1.0);
    CHECK(cert.primal == doctest::Approx(1.5).epsilon(1e-8));
    CHECK(cert.gap / cert.primal <= 1e-4);
    check_certificate(fam, 1.0, cert);
  }
  // random commutative families against the classical oracle
  const auto diag = TracialAlgebra::commutative({0.15, 0.25, 0.35, 0.25});
  Rng rng(7);
  for (double p : {1.0, 2.0, 4.0, kInf}) {
    std::vector<AlgebraElement> xs;
    for (int i = 0; i < 5; ++i) xs.push_back(random_element(diag, rng, RandomKind::positive));
    MaximalFamily fam = MaximalFamily::of(xs);
    const auto cert = positive_linf_norm(fam, p);
    CHECK(cert.primal == doctest::Approx(classical_sup_norm(fam, p)).epsilon(1e-8));
  }
}

TEST_CASE("two rank-one projections at angle pi/4: the frozen optimization oracle") {
  // independent oracle (conic solve + parameter grid, computed offline):
  // at p = 1 the optimal majorant trace is (2 + sqrt 2)/4
  const double oracle = (2.0 + std::sqrt(2.0)) / 4.0;
  const auto alg = TracialAlgebra::full_matrix(2);
  AlgebraElement p1(alg), p2(alg);
  p1.block(0) << 1, 0, 0, 0;
  const double c = std::cos(kPi / 4), s = std::sin(kPi / 4);
  p2.block(0) << c * c, c * s, c * s, s * s;
  MaximalFamily fam = MaximalFamily::of({p1, p2});
  const auto cert = positive_linf_norm(fam, 1.0);
  CHECK(cert.primal > 0.5);
  CHECK(cert.primal <= 1.0);
  CHECK(cert.gap / cert.primal <= 1e-4);
  CHECK(cert.dual <= oracle + 1e-6);
  CHECK(cert.primal >= oracle - 1e-6);
  CHECK(cert.primal == doctest::Approx(oracle).epsilon(2e-4));
  check_certificate(fam, 1.0, cert);
}

TEST_CASE("noncommutative random families close the duality gap") {
  Rng rng(11);
  int idx = 0;
  for (int n : {2, 3, 4}) {
    const auto alg = TracialAlgebra::full_matrix(n);
    for (double p : {1.0, 2.0, 4.0}) {
      std::vector<AlgebraElement> xs;
      for (int i = 0; i < 4; ++i) xs.push_back(random_element(alg, rng, RandomKind::positive));
      MaximalFamily fam = MaximalFamily::of(xs);
      const auto cert = positive_linf_norm(fam, p);
      CAPTURE(n);
      CAPTURE(p);
      CAPTURE(idx);
      CHECK(cert.gap / cert.primal <= 1e-4);
      check_certificate(fam, p, cert);
      ++idx;
    }
  }
}

TEST_CASE("scaling and merge subadditivity of the majorant norm") {
  const auto alg = TracialAlgebra::full_matrix(3);
  Rng rng(13);
  std::vector<AlgebraElement> xs, ws;
  for (int i = 0; i < 3; ++i) {
    xs.push_back(random_element(alg, rng, RandomKind::positive));
    ws.push_back(random_element(alg, rng, RandomKind::positive));
  }
  const double p = 2.0;
  const auto base = positive_linf_norm(MaximalFamily::of(xs), p);
  {  // homogeneity
    std::vector<AlgebraElement> scaled;
    for (const auto& x : xs) scaled.push_back(Complex(3.5, 0.0) * x);
    const auto cert = positive_linf_norm(MaximalFamily::of(scaled), p);
    CHECK(cert.primal == doctest::Approx(3.5 * base.primal).epsilon(1e-6));
  }
  {  // merged family vs sum of norms (subadditivity of majorants)
    std::vector<AlgebraElement> merged = xs;
    merged.insert(merged.end(), ws.begin(), ws.end());
    const auto merged_cert = positive_linf_norm(MaximalFamily::of(merged), p);
    const auto wcert = positive_linf_norm(MaximalFamily::of(ws), p);
    CHECK(merged_cert.primal <= base.primal + wcert.primal + 1e-8 +
                                    base.gap + wcert.gap);
  }
}

TEST_CASE("grid monotonicity: enlarging the family never decreases the norm") {
  const auto alg = TracialAlgebra::full_matrix(3);
  Rng rng(17);
  std::vector<AlgebraElement> xs;
  for (int i = 0; i < 6; ++i) xs.push_back(random_element(alg, rng, RandomKind::positive));
  for (double p : {1.0, 2.0}) {
    double prev_primal = 0.0, prev_gap = 0.0;
    for (std::size_t count : {2u, 4u, 6u}) {
      std::vector<AlgebraElement> sub(xs.begin(), xs.begin() + count);
      const auto cert = positive_linf_norm(MaximalFamily::of(sub), p);
      CHECK(prev_primal <= cert.primal + prev_gap + 1e-9);
      prev_primal = cert.primal;
      prev_gap = cert.gap;
    }
  }
}

TEST_CASE("domain errors") {
  const auto alg = TracialAlgebra::full_matrix(2);
  const auto sa = random_element(alg, 19, RandomKind::selfadjoint);
  CHECK_THROWS_AS(positive_linf_norm(MaximalFamily::of({sa}), 2.0), std::domain_error);
  const auto pos = random_element(alg, 19, RandomKind::positive);
  CHECK_THROWS_AS(positive_linf_norm(MaximalFamily::of({pos}), 0.5), std::domain_error);
  CHECK_THROWS_AS(column_linf_norm(MaximalFamily::of({pos}), 1.5), std::domain_error);
}

TEST_CASE("column norm: factorization identity cases") {
  const auto alg = TracialAlgebra::full_matrix(3);
  Rng rng(23);
  {  // single element: ||x||_p
    const auto x = random_element(alg, rng, RandomKind::general);
    for (double p : {2.0, 4.0}) {
      const auto col = column_linf_norm(MaximalFamily::of({x}), p);
      CHECK(col.value == doctest::Approx(lp_norm(x, p)).epsilon(1e-6));
    }
  }
  {  // scaled co-isometries: x_i = c u_i gives value c
    const double c = 1.7;
    std::vector<AlgebraElement> us;
    for (int i = 0; i < 3; ++i) {
      const auto g = random_element(alg, rng, RandomKind::general);
      us.push_back(Complex(c, 0.0) * polar_decompose(g).first);
    }
    const auto col = column_linf_norm(MaximalFamily::of(us), 4.0);
    CHECK(col.value == doctest::Approx(c).epsilon(1e-6));
  }
  {  // commutative case: classical pointwise sup of |f_i|
    const auto diag = TracialAlgebra::commutative({0.3, 0.3, 0.4});
    std::vector<AlgebraElement> fs;
    for (int i = 0; i < 4; ++i) fs.push_back(random_element(diag, rng, RandomKind::general));
    MaximalFamily fam = MaximalFamily::of(fs);
    const double p = 4.0;
    const auto col = column_linf_norm(fam, p);
    CHECK(col.value == doctest::Approx(classical_sup_norm(fam, p)).epsilon(1e-6));
  }
}

TEST_CASE("general factorization upper bound") {
  const auto alg = TracialAlgebra::full_matrix(3);
  Rng rng(29);
  {  // positive family: upper bound equals the positive norm
    std::vector<AlgebraElement> xs;
    for (int i = 0; i < 3; ++i) xs.push_back(random_element(alg, rng, RandomKind::positive));
    MaximalFamily fam = MaximalFamily::of(xs);
    const double p = 2.0;
    const auto wit = general_linf_upper(fam, p);
    const auto cert = positive_linf_norm(fam, p);
    CHECK(wit.value <= cert.primal * (1.0 + 1e-6) + 1e-9);
    CHECK(wit.value >= cert.primal * (1.0 - 1e-6) - 1e-9);
    CHECK(wit.reconstruction <= 1e-7);
    for (const auto& y : wit.y) CHECK(lp_norm(y, kInf) <= 1.0 + 1e-7);
  }
  {  // single general element: exact polar factorization
    const auto x = random_element(alg, rng, RandomKind::general);
    const auto wit = general_linf_upper(MaximalFamily::of({x}), 3.0);
    CHECK(wit.value == doctest::Approx(lp_norm(x, 3.0)).epsilon(1e-10));
    CHECK(wit.reconstruction <= 1e-11 * (1.0 + x.max_abs_entry()));
  }
  {  // {x, -x}: same bound as {|x|}
    const auto x = random_element(alg, rng, RandomKind::selfadjoint);
    const auto wit = general_linf_upper(MaximalFamily::of({x, -x}), 2.0);
    const auto single = positive_linf_norm(MaximalFamily::of({modulus(x)}), 2.0);
    CHECK(wit.value <= single.primal * (1.0 + 1e-5) + 1e-8);
    CHECK(wit.reconstruction <= 1e-7);
  }
}

TEST_CASE("harness: single real z is a contraction") {
  auto spec = GeneratorSpec::schur({{0}, {1}, {2}});
  const auto dec = eigendecompose(build_generator(spec, spec.natural_algebra()));
  const auto rep =
      maximal_inequality_harness(dec, 2.0, 0.2 * kPi, {Complex(1.0, 0.0)}, 4, 16.0, 31);
  for (const auto& row : rep.rows) CHECK(row.ratio <= 1.0 + 1e-8);
}

TEST_CASE("harness: angle hypothesis is enforced") {
  auto spec = GeneratorSpec::schur({{0}, {1}});
  const auto dec = eigendecompose(build_generator(spec, spec.natural_algebra()));
  CHECK_THROWS_AS(
      maximal_inequality_harness(dec, 4.0, 0.3 * kPi, {Complex(1.0, 0.0)}, 1, 16.0, 1),
      std::domain_error);
}

TEST_CASE("harness: commutative two-state chain matches the classical computation") {
  Eigen::MatrixXd q(2, 2);
  q << -0.8, 0.8, 0.5, -0.5;
  auto spec = GeneratorSpec::markov_chain(q);
  const auto alg = spec.natural_algebra();
  const auto dec = eigendecompose(build_generator(spec, alg));
  const double p = 2.0, psi = 0.25 * kPi;
  const auto grid = make_sector_grid(psi, 0.05, 20.0, 5, 5);
  const auto rep = maximal_inequality_harness(dec, p, psi, grid, 3, 16.0, 37);
  for (const auto& row : rep.rows) {
    const auto x = random_element(alg, row.seed, RandomKind::general);
    std::vector<AlgebraElement> moduli;
    for (Complex z : grid) moduli.push_back(modulus(apply_Tz(dec, z, x)));
    const double classical = classical_sup_norm(MaximalFamily::of(moduli), p);
    CHECK(row.ratio == doctest::Approx(classical / lp_norm(x, p)).epsilon(1e-6));
  }
  CHECK(rep.pass);
}
