#pragma once

#include <optional>

#include "ncsg/calculus.hpp"

namespace ncsg {

/// A certified lower bound on ||Phi||_{p->p}: `value` is realized by `witness`
/// (recomputable as lp_norm(Phi w, p)/lp_norm(w, p)).
struct PNormEstimate {
  double value = 0.0;
  AlgebraElement witness;
  int iterations = 0;
  bool converged = false;
};

struct AscentOptions {
  int restarts = 8;
  std::uint64_t seed = 1;
  int max_iters = 400;
  double tol = 1e-9;  // fixed-point tolerance on the Rayleigh-type quotient
  std::optional<Matrix> restrict_projector;  // GNS projector; iterates confined to its range
  bool exact_p2 = true;
};

/// Alternating duality ascent (nonlinear power method through the L_p/L_q
/// duality maps): from x, take y = Phi x, the norming functional of y in L_q,
/// pull it back through the GNS adjoint, and map back to the L_p unit sphere.
/// Always a valid lower bound; best over restarts. p = 2 is exact via the GNS
/// spectral norm unless disabled.
PNormEstimate op_pnorm_estimate(const Superoperator& phi, double p,
                                const AscentOptions& opts = {});

/// Norming functional: g with ||g||_q = 1 and tau(g* y) = ||y||_p (q conjugate).
/// p = 1 degenerates to the polar part, p = inf to the normalized top
/// singular projection.
AlgebraElement duality_element(const AlgebraElement& y, double p);

struct MultiplierBoundReport {
  double p = 0.0, psi = 0.0;
  bool hypothesis_ok = false;  // psi > |1/p - 1/2| pi
  double estimate = 0.0;       // lower bound on ||m(L)||_{p->p} on (ker L)^perp
  double sup_norm = 0.0;       // sampled sup of |m| on Sigma_psi
  double ratio = 0.0;
  double budget = 0.0;
  bool pass = false;
  std::uint64_t witness_seed = 0;
  std::string function;
  nlohmann::json to_json() const;
};

/// Boundedness test of ||m(L)||_{p->p} against budget * ||m||_{inf,Sigma_psi}.
/// With psi <= |1/p-1/2| pi the report only flags the hypothesis violation.
MultiplierBoundReport verify_multiplier_bound(const SpectralDecomposition& dec,
                                              const SectorFunction& m, double p, double psi,
                                              double budget, const AscentOptions& opts = {});

struct GrowthRow {
  double u = 0.0;
  double estimate = 0.0;
  double envelope_linear = 0.0;   // (p^2/(p-1)) (1+|u|)   e^{(pi/2)|u|}
  double envelope_interp = 0.0;   // (p^2/(p-1)) (1+|u|^k)^{|1/p-1/2|} e^{pi|1/p-1/2||u|}
};

struct GrowthReport {
  double p = 0.0;
  std::vector<GrowthRow> rows;
  double fitted_linear = 0.0;   // minimal C with estimate <= C * envelope_linear
  double fitted_interp = 0.0;
  nlohmann::json to_json() const;
};

/// Estimates ||L^{iu}||_{p->p} over u_grid and fits the minimal constants
/// for the two growth envelopes (power index of the interpolated envelope
/// parameterized, default 12).
GrowthReport imaginary_power_growth(const SpectralDecomposition& dec, double p,
                                    const std::vector<double>& u_grid,
                                    const AscentOptions& opts = {}, double power_index = 12.0);

/// sup of |m| sampled over Sigma_psi (rays up to +-psi).
double sector_sup_norm(const SectorFunction& m, double psi);

}  // namespace ncsg
