#pragma once

#include "ncsg/semigroup.hpp"

namespace ncsg {

/// Column square-function data: the Gram element
///   G_c(x) = \int_0^inf t |d/dt T_t x|^2 dt
/// in closed form through the spectral clusters, and its L_p norms.
struct SquareFunctionValue {
  double column_value = 0.0;  // || G_c(x)^{1/2} ||_p
  double row_value = 0.0;     // same with x replaced by x*
  AlgebraElement gram;        // G_c(x), positive semidefinite
  /// For 1 < p < 2: best upper bound over sampled splittings x = x1 + x2 of
  /// column(x1) + row(x2); unset otherwise.
  std::optional<double> split_upper;
};

/// Closed form: with x_k = P_k x over nonzero clusters,
///   G_c(x) = sum_{k,l} lambda_k lambda_l / (lambda_k + lambda_l)^2  x_k* x_l
/// (from \int_0^inf t e^{-t(lambda_k+lambda_l)} dt = (lambda_k+lambda_l)^{-2});
/// the kernel contributes nothing. No quadrature.
AlgebraElement gram_element(const SpectralDecomposition& dec, const AlgebraElement& x);

SquareFunctionValue square_function_norms(const SpectralDecomposition& dec,
                                          const AlgebraElement& x, double p,
                                          int split_trials = 32, std::uint64_t seed = 1);

struct EquivalenceRow {
  std::uint64_t seed = 0;
  double lhs = 0.0;    // ||x||_p of the range-part sample
  double rhs = 0.0;    // max(column, row) for p >= 2; splitting infimum bound for p < 2
  double ratio = 0.0;  // lhs / rhs
};

struct EquivalenceReport {
  double p = 0.0;
  std::vector<EquivalenceRow> rows;
  double min_ratio = kInf, max_ratio = 0.0;
  bool in_window = false;
  nlohmann::json to_json() const;
};

/// Ratio tracking of ||x||_p against the square-function side over a seed
/// sweep. Samples are range-part elements (P_0 x = 0), so at p = 2 the ratio
/// is exactly 2.
EquivalenceReport equivalence_tracker(const SpectralDecomposition& dec, double p, int seeds,
                                      std::pair<double, double> window = {1e-3, 1e3},
                                      std::uint64_t seed0 = 1);

}  // namespace ncsg
