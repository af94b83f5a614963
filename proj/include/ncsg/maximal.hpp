#pragma once

#include <string>
#include <vector>

#include "ncsg/calculus.hpp"

namespace ncsg {

/// A finite indexed family (x_i) in a common algebra.
struct MaximalFamily {
  AlgebraPtr algebra;
  std::vector<AlgebraElement> elements;
  std::vector<std::string> labels;  // optional, e.g. sampled z or t

  static MaximalFamily of(std::vector<AlgebraElement> elements);
};

/// Primal/dual certificate for the positive-family maximal norm
///   inf { ||a||_p : a >= x_i for all i }.
/// Feasibility and weak duality are checkable from the certificate alone:
/// min eig(a - x_i) >= -1e-9, y_i >= 0, ||sum y_i||_q <= 1,
/// dual = sum tau(x_i y_i) <= primal.
struct MajorantCertificate {
  AlgebraElement majorant;  // a
  double primal = 0.0;      // ||a||_p
  std::vector<AlgebraElement> duals;
  double dual = 0.0;
  double gap = 0.0;         // primal - dual
  double feasibility = 0.0; // min_i min eig(a - x_i), >= -1e-9
  bool converged = false;
  int iterations = 0;
  nlohmann::json to_json() const;
};

struct SolverOptions {
  double rel_gap_tol = 1e-4;
  int max_iters = 50000;
  int dual_every = 40;       // dual extraction cadence
  double step_scale = 1.0;   // Polyak damping
  std::uint64_t seed = 1;
};

/// Projected subgradient descent on the convex objective ||a||_p with
/// monotone rank-one feasibility repair (raising violated eigendirections of
/// a - x_i never breaks satisfied constraints), Polyak steps driven by the
/// best extracted dual value. p = inf is closed form:
/// value = max_i ||x_i||_inf, a = value * 1.
MajorantCertificate positive_linf_norm(const MaximalFamily& fam, double p,
                                       const SolverOptions& opts = {});

/// Column norm for p >= 2 through the factorization identity
/// (x_i) in L_p(l_inf^c)  <=>  (x_i* x_i) in L_{p/2}(l_inf):
/// value = sqrt of the positive_linf_norm of (x_i* x_i) at p/2.
struct ColumnCertificate {
  double value = 0.0;
  MajorantCertificate base;  // certificate of the squared family at p/2
};
ColumnCertificate column_linf_norm(const MaximalFamily& fam, double p,
                                   const SolverOptions& opts = {});

/// Factorization x_i = a y_i b with a = b = M^{1/2}, M the computed majorant
/// of the positive parts (|h_i|, |k_i|) of x_i = h_i + i k_i; a valid upper
/// bound on the factorization norm (sup ||y_i|| <= 1 for selfadjoint
/// families, <= 2 generally). Single-element families use the exact polar
/// factorization x = |x*|^{1/2} u |x|^{1/2}.
struct FactorizationWitness {
  AlgebraElement a, b;
  std::vector<AlgebraElement> y;
  double value = 0.0;         // ||a||_2p * sup ||y_i||_inf * ||b||_2p
  double reconstruction = 0.0;  // max_i max entry of |a y_i b - x_i|
};
FactorizationWitness general_linf_upper(const MaximalFamily& fam, double p,
                                        const SolverOptions& opts = {});

struct HarnessRow {
  std::uint64_t seed = 0;
  double ratio = 0.0;          // ||sup+ |T_z x|||_p / ||x||_p   (modulus family)
  double factor_upper = 0.0;   // factorization upper bound / ||x||_p
  double multiplier_part = 0.0;  // modulus-family norm of the m_theta pieces
  double ergodic_part = 0.0;     // modulus-family norm of the averages
};

struct HarnessReport {
  double p = 0.0, psi = 0.0;
  double envelope = 0.0;        // C(p, psi) from the growth envelope
  double ergodic_budget = 0.0;  // configured constant for the average part
  std::vector<HarnessRow> rows;
  double max_ratio = 0.0;
  bool pass = false;  // every ratio finite and <= envelope + ergodic_budget
  nlohmann::json to_json() const;
};

/// Maximal-inequality harness over a finite sector grid: for each sample x
/// builds (T_z x)_{z in grid}, evaluates the family norm through the positive
/// route on moduli (exact classical value on commutative algebras) plus the
/// factorization upper bound, and the two decomposition pieces
/// T_z = m_theta(tL) + ergodic average.
HarnessReport maximal_inequality_harness(const SpectralDecomposition& dec, double p, double psi,
                                         const std::vector<Complex>& z_grid, int samples,
                                         double ergodic_budget, std::uint64_t seed,
                                         const SolverOptions& opts = {});

/// Log-radial x angular grid strictly inside Sigma_psi.
std::vector<Complex> make_sector_grid(double psi, double rmin, double rmax, int radial,
                                      int angular);

}  // namespace ncsg
