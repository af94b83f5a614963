#include "ncsg/squarefn.hpp"

#include <algorithm>
#include <cmath>

namespace ncsg {

AlgebraElement gram_element(const SpectralDecomposition& dec, const AlgebraElement& x) {
  std::vector<int> nonzero;
  for (int k = 0; k < dec.cluster_count(); ++k)
    if (k != dec.kernel_index()) nonzero.push_back(k);
  AlgebraElement g(dec.algebra());
  std::vector<AlgebraElement> parts;
  parts.reserve(nonzero.size());
  for (int k : nonzero) parts.push_back(dec.component(k, x));
  for (std::size_t a = 0; a < nonzero.size(); ++a)
    for (std::size_t b = 0; b < nonzero.size(); ++b) {
      const double la = dec.eigenvalue(nonzero[a]), lb = dec.eigenvalue(nonzero[b]);
      const double coeff = la * lb / ((la + lb) * (la + lb));
      g += Complex(coeff, 0.0) * (parts[a].adjoint() * parts[b]);
    }
  return g;
}

SquareFunctionValue square_function_norms(const SpectralDecomposition& dec,
                                          const AlgebraElement& x, double p, int split_trials,
                                          std::uint64_t seed) {
  if (!(p > 1.0) || std::isinf(p))
    throw std::domain_error("square_function_norms requires 1 < p < inf");
  SquareFunctionValue out{0.0, 0.0, gram_element(dec, x), {}};
  out.column_value = lp_norm(pos_power(out.gram, 0.5), p);
  out.row_value = lp_norm(pos_power(gram_element(dec, x.adjoint()), 0.5), p);

  if (p < 2.0 && split_trials > 0) {
    // upper bound on the splitting infimum inf { col(x1) + row(x2) : x = x1+x2 }
    auto column_of = [&](const AlgebraElement& y) {
      return lp_norm(pos_power(gram_element(dec, y), 0.5), p);
    };
    auto row_of = [&](const AlgebraElement& y) {
      return lp_norm(pos_power(gram_element(dec, y.adjoint()), 0.5), p);
    };
    double best = std::min(column_of(x), row_of(x));  // trivial splits (x,0), (0,x)
    Rng rng(seed);
    for (int t = 0; t < split_trials; ++t) {
      // random per-cluster convex coefficients
      AlgebraElement x1(dec.algebra());
      for (int k = 0; k < dec.cluster_count(); ++k) {
        const double c = k == dec.kernel_index() ? 1.0 : rng.uniform();
        x1 += Complex(c, 0.0) * dec.component(k, x);
      }
      const AlgebraElement x2 = x - x1;
      best = std::min(best, column_of(x1) + row_of(x2));
    }
    out.split_upper = best;
  }
  return out;
}

nlohmann::json EquivalenceReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows)
    rows_json.push_back(
        {{"seed", r.seed}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio", r.ratio}});
  return {{"p", p},
          {"min_ratio", min_ratio},
          {"max_ratio", max_ratio},
          {"in_window", in_window},
          {"rows", rows_json}};
}

EquivalenceReport equivalence_tracker(const SpectralDecomposition& dec, double p, int seeds,
                                      std::pair<double, double> window, std::uint64_t seed0) {
  if (!(p > 1.0) || std::isinf(p))
    throw std::domain_error("equivalence_tracker requires 1 < p < inf");
  EquivalenceReport rep;
  rep.p = p;
  for (int s = 0; s < seeds; ++s) {
    const std::uint64_t sd = mix_seed(seed0, static_cast<std::uint64_t>(s));
    AlgebraElement x = random_element(dec.algebra(), sd, RandomKind::general);
    x -= fixed_point_projection(dec, x);  // range part: the calculus lives on (ker L)^perp
    const SquareFunctionValue v = square_function_norms(dec, x, p, 24, mix_seed(sd, 77));
    EquivalenceRow row;
    row.seed = sd;
    row.lhs = lp_norm(x, p);
    row.rhs = p >= 2.0 ? std::max(v.column_value, v.row_value)
                       : (v.split_upper ? *v.split_upper
                                        : std::min(v.column_value, v.row_value));
    row.ratio = row.rhs > 0 ? row.lhs / row.rhs : kInf;
    rep.min_ratio = std::min(rep.min_ratio, row.ratio);
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    rep.rows.push_back(row);
  }
  rep.in_window = rep.min_ratio >= window.first && rep.max_ratio <= window.second &&
                  std::isfinite(rep.max_ratio);
  return rep;
}

}  // namespace ncsg
