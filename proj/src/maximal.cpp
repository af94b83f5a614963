#include "ncsg/maximal.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace ncsg {

namespace {

constexpr double kFeasTol = 1e-12;

double conjugate_exponent(double p) {
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

struct EigCache {
  Eigen::VectorXd values;
  Matrix vectors;
};

EigCache block_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + Matrix(m.adjoint())));
  return {es.eigenvalues(), es.eigenvectors()};
}

/// One ordered sweep: for each constraint, add back the negated negative part
/// of (a - x_i). Rank-one additions are PSD, so constraints fixed earlier in
/// the sweep stay satisfied; the sweep ends feasible.
void repair_feasibility(AlgebraElement& a, const std::vector<AlgebraElement>& fam, double tol) {
  for (const auto& x : fam) {
    for (int b = 0; b < a.block_count(); ++b) {
      const Matrix diff = a.block(b) - x.block(b);
      EigCache eig = block_eig(diff);
      for (int k = 0; k < eig.values.size(); ++k)
        if (eig.values[k] < -tol)
          a.block(b) += (-eig.values[k]) * eig.vectors.col(k) * eig.vectors.col(k).adjoint();
    }
  }
}

double min_slack(const AlgebraElement& a, const std::vector<AlgebraElement>& fam) {
  double m = kInf;
  for (const auto& x : fam) m = std::min(m, (a - x).min_eigenvalue());
  return m;
}

/// Normalized subgradient of ||a||_p at a positive a: a^{p-1}/||a^{p-1}||_q.
AlgebraElement norm_subgradient(const AlgebraElement& a, double p, double q) {
  AlgebraElement g =
      p == 1.0 ? AlgebraElement::identity(a.algebra()) : pos_power(a, p - 1.0);
  const double nq = lp_norm(g, q);
  if (nq > 0) g *= Complex(1.0 / nq, 0.0);
  return g;
}

/// Dual recovery at a near-optimal a: y_i supported on the contact subspaces
/// of (a - x_i), fitted to the subgradient by projected gradient over the PSD
/// cone, then scaled so ||sum y_i||_q <= 1 exactly.
struct DualFit {
  std::vector<AlgebraElement> y;
  double value = 0.0;
};

DualFit extract_dual(const AlgebraElement& a, const std::vector<AlgebraElement>& fam, double p,
                     double q, int pg_iters) {
  const AlgebraPtr alg = a.algebra();
  const int nfam = static_cast<int>(fam.size());
  const double scale = std::max(1.0, a.max_abs_entry());
  const double contact_tol = 1e-5 * scale;
  const AlgebraElement g = norm_subgradient(a, p, q);

  // contact bases: per constraint, per block, eigendirections near zero
  struct Basis {
    int block = 0;
    Matrix vectors;  // orthonormal columns
  };
  std::vector<std::vector<Basis>> bases(nfam);
  std::vector<std::vector<Matrix>> z(nfam);  // PSD coefficient matrices
  bool any = false;
  for (int i = 0; i < nfam; ++i) {
    double min_val = kInf;
    std::vector<std::pair<int, std::vector<int>>> picks;
    std::vector<EigCache> eigs(a.block_count());
    for (int b = 0; b < a.block_count(); ++b) {
      eigs[b] = block_eig(a.block(b) - fam[i].block(b));
      min_val = std::min(min_val, eigs[b].values.minCoeff());
    }
    const double cth = std::max(contact_tol, min_val + 1e-9 * scale);
    for (int b = 0; b < a.block_count(); ++b) {
      std::vector<int> cols;
      for (int k = 0; k < eigs[b].values.size(); ++k)
        if (eigs[b].values[k] <= cth) cols.push_back(k);
      if (cols.empty()) continue;
      Basis bs;
      bs.block = b;
      bs.vectors.resize(eigs[b].vectors.rows(), cols.size());
      for (std::size_t c = 0; c < cols.size(); ++c)
        bs.vectors.col(c) = eigs[b].vectors.col(cols[c]);
      bases[i].push_back(std::move(bs));
      any = true;
    }
    z[i].resize(bases[i].size());
    for (std::size_t s = 0; s < bases[i].size(); ++s) {
      const auto& bs = bases[i][s];
      Matrix init = bs.vectors.adjoint() * g.block(bs.block) * bs.vectors / double(nfam);
      EigCache e = block_eig(init);
      Matrix proj = Matrix::Zero(init.rows(), init.cols());
      for (int k = 0; k < e.values.size(); ++k)
        if (e.values[k] > 0) proj += e.values[k] * e.vectors.col(k) * e.vectors.col(k).adjoint();
      z[i][s] = std::move(proj);
    }
  }
  DualFit out;
  out.y.assign(nfam, AlgebraElement(alg));
  if (!any) return out;

  auto assemble = [&](int i) {
    AlgebraElement yi(alg);
    for (std::size_t s = 0; s < bases[i].size(); ++s) {
      const auto& bs = bases[i][s];
      yi.block(bs.block) += bs.vectors * z[i][s] * bs.vectors.adjoint();
    }
    return yi;
  };

  double wmax = 0.0;
  for (int b = 0; b < alg->block_count(); ++b)
    wmax = std::max(wmax, alg->trace_weight(b) / alg->block_dim(b));
  const double step = 0.45 / (wmax * std::max(1, nfam));

  for (int it = 0; it < pg_iters; ++it) {
    AlgebraElement residual = -g;
    for (int i = 0; i < nfam; ++i) residual += assemble(i);
    double rn = 0.0;
    for (int b = 0; b < alg->block_count(); ++b) rn = std::max(rn, residual.block(b).norm());
    if (rn < 1e-12) break;
    for (int i = 0; i < nfam; ++i)
      for (std::size_t s = 0; s < bases[i].size(); ++s) {
        const auto& bs = bases[i][s];
        const double w = alg->trace_weight(bs.block) / alg->block_dim(bs.block);
        Matrix grad = 2.0 * w * (bs.vectors.adjoint() * residual.block(bs.block) * bs.vectors);
        Matrix cand = z[i][s] - step * grad;
        EigCache e = block_eig(cand);
        Matrix proj = Matrix::Zero(cand.rows(), cand.cols());
        for (int k = 0; k < e.values.size(); ++k)
          if (e.values[k] > 0)
            proj += e.values[k] * e.vectors.col(k) * e.vectors.col(k).adjoint();
        z[i][s] = std::move(proj);
      }
  }

  AlgebraElement total(alg);
  for (int i = 0; i < nfam; ++i) {
    out.y[i] = assemble(i);
    total += out.y[i];
  }
  const double nq = lp_norm(total, q);
  if (nq > 1.0)
    for (auto& yi : out.y) yi *= Complex(1.0 / nq, 0.0);
  double val = 0.0;
  for (int i = 0; i < nfam; ++i) val += trace(fam[i] * out.y[i]).real();
  out.value = std::max(0.0, val);
  return out;
}

}  // namespace

MaximalFamily MaximalFamily::of(std::vector<AlgebraElement> elements) {
  if (elements.empty()) throw std::invalid_argument("maximal family must be nonempty");
  MaximalFamily fam;
  fam.algebra = elements.front().algebra();
  for (const auto& x : elements)
    if (!fam.algebra->same_as(*x.algebra()))
      throw std::invalid_argument("maximal family elements must share one algebra");
  fam.elements = std::move(elements);
  return fam;
}

nlohmann::json MajorantCertificate::to_json() const {
  return {{"primal", primal},     {"dual", dual},
          {"gap", gap},           {"feasibility", feasibility},
          {"converged", converged}, {"iterations", iterations}};
}

MajorantCertificate positive_linf_norm(const MaximalFamily& fam, double p,
                                       const SolverOptions& opts) {
  if (fam.elements.empty()) throw std::invalid_argument("maximal family must be nonempty");
  if (!(p >= 1.0) && !std::isinf(p))
    throw std::domain_error("positive_linf_norm requires 1 <= p <= inf");
  const AlgebraPtr alg = fam.algebra;
  double scale = 0.0;
  for (const auto& x : fam.elements) {
    scale = std::max(scale, x.max_abs_entry());
    if (x.hermiticity_residual() > 1e-9 * (1.0 + x.max_abs_entry()) ||
        x.min_eigenvalue() < -1e-9 * (1.0 + x.max_abs_entry()))
      throw std::domain_error("positive_linf_norm requires positive semidefinite elements");
  }

  MajorantCertificate cert;
  cert.majorant = AlgebraElement(alg);
  cert.duals.assign(fam.elements.size(), AlgebraElement(alg));
  if (scale == 0.0) {  // zero family
    cert.converged = true;
    return cert;
  }

  if (std::isinf(p)) {
    // closed form: value = max_i ||x_i||_inf, a = value * 1
    double value = 0.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < fam.elements.size(); ++i) {
      const double n = lp_norm(fam.elements[i], kInf);
      if (n > value) {
        value = n;
        arg = i;
      }
    }
    cert.majorant = Complex(value, 0.0) * AlgebraElement::identity(alg);
    cert.primal = value;
    // dual: normalized top eigenprojection of the attaining element
    const auto& x = fam.elements[arg];
    int bbest = 0, kbest = 0;
    double best = -kInf;
    std::vector<EigCache> eigs(x.block_count());
    for (int b = 0; b < x.block_count(); ++b) {
      eigs[b] = block_eig(x.block(b));
      for (int k = 0; k < eigs[b].values.size(); ++k)
        if (eigs[b].values[k] > best) {
          best = eigs[b].values[k];
          bbest = b;
          kbest = k;
        }
    }
    AlgebraElement y(alg);
    const double w = alg->trace_weight(bbest) / alg->block_dim(bbest);
    y.block(bbest) =
        (1.0 / w) * eigs[bbest].vectors.col(kbest) * eigs[bbest].vectors.col(kbest).adjoint();
    cert.duals[arg] = y;
    cert.dual = trace(x * y).real();
    cert.gap = cert.primal - cert.dual;
    cert.feasibility = min_slack(cert.majorant, fam.elements);
    cert.converged = true;
    return cert;
  }

  const double q = conjugate_exponent(p);

  // feasible warm start: (sum x_i^p)^{1/p} >= x_j by operator monotonicity of t^{1/p}
  AlgebraElement a(alg);
  for (const auto& x : fam.elements) a += pos_power(x, p);
  a = pos_power(a, 1.0 / p);
  repair_feasibility(a, fam.elements, kFeasTol * scale);

  AlgebraElement a_best = a;
  double f_best = lp_norm(a, p);
  double d_best = 0.0;
  std::vector<AlgebraElement> y_best(fam.elements.size(), AlgebraElement(alg));
  bool converged = false;
  int it = 0;

  auto try_dual = [&](const AlgebraElement& at, int pg_iters) {
    DualFit fit = extract_dual(at, fam.elements, p, q, pg_iters);
    if (fit.value > d_best) {
      d_best = fit.value;
      y_best = std::move(fit.y);
    }
  };
  try_dual(a_best, 120);

  for (; it < opts.max_iters; ++it) {
    const double f = lp_norm(a, p);
    if (f < f_best) {
      f_best = f;
      a_best = a;
    }
    if (!(f_best > 1e-300)) break;
    if ((f_best - d_best) / f_best <= opts.rel_gap_tol && it > 2) {
      converged = true;
      break;
    }
    if (it == 60 || it == 250 || (it > 250 && it % 500 == 0)) try_dual(a_best, 150);

    const AlgebraElement g = norm_subgradient(a, p, q);
    const double gnorm2 = std::abs(gns_inner(g, g));
    if (!(gnorm2 > 0)) break;
    double alpha = opts.step_scale * (f - d_best) / gnorm2;
    alpha = std::min(alpha, 0.3 * f / gnorm2);
    a -= Complex(alpha, 0.0) * g;
    repair_feasibility(a, fam.elements, kFeasTol * scale);
  }
  {
    const double f = lp_norm(a, p);
    if (f < f_best) {
      f_best = f;
      a_best = a;
    }
  }
  try_dual(a_best, 800);

  cert.majorant = a_best;
  cert.primal = f_best;
  cert.duals = y_best;
  cert.dual = d_best;
  cert.gap = f_best - d_best;
  cert.feasibility = min_slack(a_best, fam.elements);
  cert.converged = converged || cert.gap / std::max(f_best, 1e-300) <= opts.rel_gap_tol;
  cert.iterations = it;
  return cert;
}

ColumnCertificate column_linf_norm(const MaximalFamily& fam, double p, const SolverOptions& opts) {
  if (!(p >= 2.0)) throw std::domain_error("column norm is defined for 2 <= p <= inf");
  std::vector<AlgebraElement> squares;
  squares.reserve(fam.elements.size());
  for (const auto& x : fam.elements) squares.push_back(x.adjoint() * x);
  MaximalFamily sq = MaximalFamily::of(std::move(squares));
  const double half = std::isinf(p) ? kInf : p / 2.0;
  ColumnCertificate out;
  out.base = positive_linf_norm(sq, half, opts);
  out.value = std::sqrt(std::max(0.0, out.base.primal));
  return out;
}

FactorizationWitness general_linf_upper(const MaximalFamily& fam, double p,
                                        const SolverOptions& opts) {
  FactorizationWitness out;
  const AlgebraPtr alg = fam.algebra;
  const double p2 = std::isinf(p) ? kInf : 2.0 * p;

  if (fam.elements.size() == 1) {
    // exact polar factorization x = |x*|^{1/2} u |x|^{1/2}
    const auto& x = fam.elements.front();
    auto [u, mod] = polar_decompose(x);
    out.a = pos_power(modulus(x.adjoint()), 0.5);
    out.b = pos_power(mod, 0.5);
    out.y = {u};
    out.value = lp_norm(out.a, p2) * lp_norm(u, kInf) * lp_norm(out.b, p2);
    out.reconstruction = (out.a * u * out.b - x).max_abs_entry();
    return out;
  }

  std::vector<AlgebraElement> positives;
  double scale = 0.0;
  for (const auto& x : fam.elements) scale = std::max(scale, x.max_abs_entry());
  for (const auto& x : fam.elements) {
    const AlgebraElement h = hermitian_part(x);
    const AlgebraElement k = antihermitian_part(x);
    if (h.max_abs_entry() > 1e-14 * (1.0 + scale)) positives.push_back(modulus(h));
    if (k.max_abs_entry() > 1e-14 * (1.0 + scale)) positives.push_back(modulus(k));
  }
  if (positives.empty()) {  // zero family
    out.a = AlgebraElement(alg);
    out.b = AlgebraElement(alg);
    out.y.assign(fam.elements.size(), AlgebraElement(alg));
    return out;
  }
  const MajorantCertificate cert =
      positive_linf_norm(MaximalFamily::of(std::move(positives)), p, opts);
  const AlgebraElement root = pos_power(cert.majorant, 0.5);
  const AlgebraElement root_inv = pos_power(cert.majorant, -0.5);
  out.a = root;
  out.b = root;
  double ynorm = 0.0;
  for (const auto& x : fam.elements) {
    out.y.push_back(root_inv * x * root_inv);
    ynorm = std::max(ynorm, lp_norm(out.y.back(), kInf));
    out.reconstruction =
        std::max(out.reconstruction, (root * out.y.back() * root - x).max_abs_entry());
  }
  out.value = lp_norm(root, p2) * ynorm * lp_norm(root, p2);
  return out;
}

std::vector<Complex> make_sector_grid(double psi, double rmin, double rmax, int radial,
                                      int angular) {
  if (!(psi >= 0) || !(rmin > 0) || !(rmax >= rmin) || radial < 1 || angular < 1)
    throw std::invalid_argument("bad sector grid shape");
  std::vector<Complex> grid;
  const double amax = 0.95 * psi;
  for (int r = 0; r < radial; ++r) {
    const double rad = rmin * std::pow(rmax / rmin, radial == 1 ? 0.0 : double(r) / (radial - 1));
    for (int a = 0; a < angular; ++a) {
      const double ang = angular == 1 ? 0.0 : -amax + 2.0 * amax * a / (angular - 1);
      grid.push_back(std::polar(rad, ang));
    }
  }
  return grid;
}

nlohmann::json HarnessReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back({{"seed", r.seed},
                         {"ratio", r.ratio},
                         {"factor_upper", r.factor_upper},
                         {"multiplier_part", r.multiplier_part},
                         {"ergodic_part", r.ergodic_part}});
  return {{"p", p},
          {"psi", psi},
          {"envelope", envelope},
          {"ergodic_budget", ergodic_budget},
          {"max_ratio", max_ratio},
          {"pass", pass},
          {"rows", rows_json}};
}

HarnessReport maximal_inequality_harness(const SpectralDecomposition& dec, double p, double psi,
                                         const std::vector<Complex>& z_grid, int samples,
                                         double ergodic_budget, std::uint64_t seed,
                                         const SolverOptions& opts) {
  if (!(p > 1.0) || std::isinf(p))
    throw std::domain_error("maximal_inequality_harness requires 1 < p < inf");
  if (!(psi / kPi < 0.5 - std::abs(1.0 / p - 0.5)))
    throw std::domain_error(
        "maximal-inequality angle hypothesis violated: require psi/pi < 1/2 - |1/p - 1/2|");
  if (z_grid.empty()) throw std::invalid_argument("z grid must be nonempty");
  for (Complex z : z_grid)
    if (std::abs(std::arg(z)) >= psi + 1e-12 || !(std::abs(z) > 0))
      throw std::domain_error("z grid must lie inside the sector");

  HarnessReport rep;
  rep.p = p;
  rep.psi = psi;
  rep.envelope = envelope_constant(p, psi).value;
  rep.ergodic_budget = ergodic_budget;

  // the ergodic piece depends on t = |z| only
  std::vector<double> t_values;
  for (Complex z : z_grid) t_values.push_back(std::abs(z));
  std::sort(t_values.begin(), t_values.end());
  t_values.erase(std::unique(t_values.begin(), t_values.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                 t_values.end());

  for (int s = 0; s < samples; ++s) {
    const std::uint64_t sample_seed = mix_seed(seed, static_cast<std::uint64_t>(s));
    const AlgebraElement x = random_element(dec.algebra(), sample_seed, RandomKind::general);
    const double xnorm = lp_norm(x, p);

    std::vector<AlgebraElement> family, moduli, mult_moduli, erg_moduli;
    for (Complex z : z_grid) {
      AlgebraElement tzx = apply_Tz(dec, z, x);
      moduli.push_back(modulus(tzx));
      family.push_back(std::move(tzx));
      const double t = std::abs(z);
      const double theta = std::arg(z);
      mult_moduli.push_back(
          modulus(apply_multiplier(dec, SectorFunction::m_theta_scaled(t, theta), x)));
    }
    for (double t : t_values)
      erg_moduli.push_back(modulus(
          dec.apply_symbol([t](double lam) { return Complex(ergodic_symbol(t, lam)); }, x)));

    HarnessRow row;
    row.seed = sample_seed;
    row.ratio = positive_linf_norm(MaximalFamily::of(moduli), p, opts).primal / xnorm;
    row.factor_upper = general_linf_upper(MaximalFamily::of(family), p, opts).value / xnorm;
    row.multiplier_part =
        positive_linf_norm(MaximalFamily::of(mult_moduli), p, opts).primal / xnorm;
    row.ergodic_part = positive_linf_norm(MaximalFamily::of(erg_moduli), p, opts).primal / xnorm;
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    rep.rows.push_back(row);
  }
  rep.pass = std::isfinite(rep.max_ratio) && rep.max_ratio <= rep.envelope + rep.ergodic_budget;
  return rep;
}

}  // namespace ncsg
