#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ncsg/algebra.hpp"

namespace ncsg {

/// Constructively standard generator families. Every variant yields a
/// completely positive, unital, trace-selfadjoint semigroup by construction:
///   Schur         — psi(i,j) = |b_i - b_j|^2 acting diagonally on matrix units
///                   (conditionally negative definite, hence Schoenberg-CP);
///   Depolarizing  — L = rate * (id - tau(.)1);
///   MarkovChain   — L = -Q on a commutative algebra, Q reversible w.r.t. the
///                   stationary weights (detailed balance);
///   TensorSum     — L = L1 ⊗ id + id ⊗ L2 on the tensor-product algebra.
struct GeneratorSpec {
  enum class Kind { schur, depolarizing, markov_chain, tensor_sum };
  Kind kind = Kind::depolarizing;

  std::vector<std::vector<double>> schur_vectors;  // one vector per index
  double rate = 1.0;
  Eigen::MatrixXd rate_matrix;                         // Q, rows sum to 0
  std::optional<std::vector<double>> chain_weights;    // stationary measure
  std::shared_ptr<GeneratorSpec> left, right;

  static GeneratorSpec schur(std::vector<std::vector<double>> vectors);
  static GeneratorSpec depolarizing(double rate);
  static GeneratorSpec markov_chain(Eigen::MatrixXd q,
                                    std::optional<std::vector<double>> weights = {});
  static GeneratorSpec tensor_sum(GeneratorSpec l, GeneratorSpec r);

  /// The algebra this spec naturally acts on (M_n for Schur with n vectors is
  /// not implied; depolarizing needs an explicit algebra, so this returns the
  /// natural one only where the spec determines it).
  AlgebraPtr natural_algebra() const;

  nlohmann::json to_json() const;
  static GeneratorSpec from_json(const nlohmann::json& j);
};

/// A linear map on M written in the tau-orthonormal matrix-unit basis of the
/// GNS space <x,y> = tau(x* y). Trace-selfadjoint *-preserving maps are
/// Hermitian matrices here.
class Superoperator {
public:
  Superoperator(AlgebraPtr algebra, Matrix gns_matrix);
  static Superoperator identity(const AlgebraPtr& algebra);

  const AlgebraPtr& algebra() const { return algebra_; }
  const Matrix& matrix() const { return mat_; }

  AlgebraElement apply(const AlgebraElement& x) const;
  AlgebraElement apply_adjoint(const AlgebraElement& x) const;  // GNS adjoint
  Superoperator gns_adjoint() const;

  double symmetry_residual() const;  // ||mat - mat*|| relative

private:
  AlgebraPtr algebra_;
  Matrix mat_;
};

/// Spectral resolution of a GNS-symmetric PSD generator: eigenvalues clustered
/// by relative gap, one GNS-orthogonal projection per cluster, the zero
/// cluster (kernel of L, containing the identity) separated out.
class SpectralDecomposition {
public:
  const AlgebraPtr& algebra() const { return algebra_; }
  int cluster_count() const { return static_cast<int>(eigenvalues_.size()); }
  double eigenvalue(int k) const { return eigenvalues_[k]; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const Matrix& projection(int k) const { return projections_[k]; }
  int kernel_index() const { return kernel_index_; }  // -1 when ker L = 0
  /// Smallest nonzero eigenvalue (the spectral gap).
  double gap() const;

  /// sum_k f(lambda_k) P_k x. When `kernel_value` is set it replaces f(0) on
  /// the kernel cluster; otherwise f is evaluated there like anywhere else.
  AlgebraElement apply_symbol(const std::function<Complex(double)>& f,
                              const AlgebraElement& x,
                              std::optional<Complex> kernel_value = {}) const;

  /// GNS matrix of sum_k f(lambda_k) P_k (kernel handled as in apply_symbol;
  /// `kernel_value` unset means f(0) on the kernel).
  Matrix symbol_matrix(const std::function<Complex(double)>& f,
                       std::optional<Complex> kernel_value = {}) const;

  /// GNS component of x on cluster k, as an element.
  AlgebraElement component(int k, const AlgebraElement& x) const;
  /// Projection onto the orthogonal complement of the kernel, as a GNS matrix.
  Matrix range_projector() const;
  double kernel_mass(const AlgebraElement& x) const;  // ||P_0 x||_2

private:
  friend SpectralDecomposition eigendecompose(const Superoperator& generator);
  AlgebraPtr algebra_;
  std::vector<double> eigenvalues_;
  std::vector<Matrix> projections_;
  int kernel_index_ = -1;
};

struct CheckRow {
  std::string name;
  bool pass = false;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<CheckRow> checks;
  bool all_pass() const;
  double worst_residual() const;
  nlohmann::json to_json() const;
};

Superoperator build_generator(const GeneratorSpec& spec, const AlgebraPtr& algebra);

/// Complete positivity / unitality / trace-selfadjointness / L_p-contraction
/// checks of the map `phi` itself (CP via the Choi matrix; column-stacking
/// convention, see choi_matrix).
ValidationReport check_standard_map(const Superoperator& phi, std::uint64_t seed = 7,
                                    double tol = 1e-9);

/// Runs check_standard_map on e^{-tL} for each sampled t. Failures are
/// reported, never thrown.
ValidationReport check_standard_semigroup(const Superoperator& generator,
                                          const std::vector<double>& t_samples,
                                          std::uint64_t seed = 7, double tol = 1e-9);

/// Choi matrix of phi over the embedding M ⊆ M_N (N = sum of block dims):
/// C[(p,r),(q,s)] = phi(E_pq)(r,s) for (p,q) inside a block, i.e. the
/// column-stacking convention C = sum_pq E_pq ⊗ phi(E_pq). phi is CP on M
/// iff C is PSD.
Matrix choi_matrix(const Superoperator& phi);

/// Clusters eigenvalues with relative gap tolerance 1e-8; throws
/// ValidationError when the GNS symmetry residual exceeds 1e-8 or the
/// spectrum dips below -1e-10 (relative).
SpectralDecomposition eigendecompose(const Superoperator& generator);

AlgebraElement fixed_point_projection(const SpectralDecomposition& dec,
                                      const AlgebraElement& x);

/// T_t x = sum_k e^{-t lambda_k} P_k x; exact at t = 0. t < 0 throws.
AlgebraElement apply_Tt(const SpectralDecomposition& dec, const AlgebraElement& x, double t);

/// e^{-tL} as a superoperator.
Superoperator semigroup_map(const SpectralDecomposition& dec, double t);

}  // namespace ncsg
