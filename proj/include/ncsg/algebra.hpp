#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ncsg/common.hpp"

namespace ncsg {

using Matrix = Eigen::MatrixXcd;
using GnsVector = Eigen::VectorXcd;

class TracialAlgebra;
using AlgebraPtr = std::shared_ptr<const TracialAlgebra>;

/// Finite von Neumann algebra model: a block-diagonal complex matrix algebra
/// M = ⊕_b M_{n_b} carrying the normalized faithful trace
///     tau(x) = sum_b w_b * tr(x_b) / n_b,      sum_b w_b = 1,  w_b > 0.
/// A single block of size n gives M_n with tau = tr/n; all blocks of size 1
/// give a classical probability space with weights (w_b).
class TracialAlgebra {
public:
  static AlgebraPtr full_matrix(int n);
  static AlgebraPtr commutative(std::vector<double> weights);
  static AlgebraPtr block_diagonal(std::vector<int> block_dims,
                                   std::vector<double> trace_weights);
  /// Tensor product; blocks are ordered left-major: block (a,b) -> a*right_count+b,
  /// inner index of E_ij ⊗ E_kl inside block (a,b) is (i*m_b+k, j*m_b+l).
  static AlgebraPtr tensor_product(const AlgebraPtr& left, const AlgebraPtr& right);

  int block_count() const { return static_cast<int>(dims_.size()); }
  int block_dim(int b) const { return dims_[b]; }
  double trace_weight(int b) const { return weights_[b]; }
  const std::vector<int>& block_dims() const { return dims_; }
  const std::vector<double>& trace_weights() const { return weights_; }

  /// Dimension of M as a GNS Hilbert space under <x,y> = tau(x* y).
  int gns_dim() const { return gns_dim_; }
  int gns_offset(int b) const { return offsets_[b]; }
  int gns_index(int b, int i, int j) const { return offsets_[b] + i * dims_[b] + j; }

  bool same_as(const TracialAlgebra& other) const;
  bool is_commutative() const;  // all blocks of size 1

  nlohmann::json to_json() const;  // {"blocks": [...], "weights": [...]}
  static AlgebraPtr from_json(const nlohmann::json& j);

private:
  TracialAlgebra(std::vector<int> dims, std::vector<double> weights);
  std::vector<int> dims_;
  std::vector<double> weights_;
  std::vector<int> offsets_;
  int gns_dim_ = 0;
};

/// An element x of a TracialAlgebra: one dense complex matrix per block.
/// Entries outside the declared blocks are identically zero by representation.
class AlgebraElement {
public:
  AlgebraElement() = default;  // empty; assign before use
  explicit AlgebraElement(AlgebraPtr algebra);  // zero element
  static AlgebraElement identity(const AlgebraPtr& algebra);
  /// Diagonal element across all blocks; `entries` has sum(block_dims) values.
  static AlgebraElement diagonal(const AlgebraPtr& algebra,
                                 const std::vector<Complex>& entries);

  const AlgebraPtr& algebra() const { return algebra_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }
  Matrix& block(int b) { return blocks_[b]; }
  const Matrix& block(int b) const { return blocks_[b]; }

  AlgebraElement adjoint() const;
  AlgebraElement operator+(const AlgebraElement& rhs) const;
  AlgebraElement operator-(const AlgebraElement& rhs) const;
  AlgebraElement operator-() const;
  AlgebraElement operator*(const AlgebraElement& rhs) const;  // algebra product
  AlgebraElement& operator+=(const AlgebraElement& rhs);
  AlgebraElement& operator-=(const AlgebraElement& rhs);
  AlgebraElement& operator*=(Complex scalar);
  friend AlgebraElement operator*(Complex scalar, AlgebraElement x) {
    x *= scalar;
    return x;
  }

  double hermiticity_residual() const;  // max entry of |x - x*|
  bool is_hermitian(double tol = 1e-10) const;
  /// Smallest eigenvalue over blocks; requires (numerically) Hermitian input.
  double min_eigenvalue() const;
  double max_abs_entry() const;

  GnsVector to_gns() const;
  static AlgebraElement from_gns(const AlgebraPtr& algebra, const GnsVector& coords);

  nlohmann::json to_json() const;  // nested arrays of [re, im] per block
  static AlgebraElement from_json(const AlgebraPtr& algebra, const nlohmann::json& j);

private:
  void check_same_algebra(const AlgebraElement& rhs) const;
  AlgebraPtr algebra_;
  std::vector<Matrix> blocks_;
};

/// p = p* = p^2 up to 1e-10, tau(p) in [0,1].
class ProjectionElement {
public:
  static ProjectionElement from_element(AlgebraElement p, double tol = 1e-10);
  const AlgebraElement& element() const { return p_; }
  double trace_value() const { return trace_; }
  double complement_trace() const { return 1.0 - trace_; }

private:
  explicit ProjectionElement(AlgebraElement p, double trace) : p_(std::move(p)), trace_(trace) {}
  AlgebraElement p_;
  double trace_;
};

Complex trace(const AlgebraElement& x);
/// GNS inner product <x,y> = tau(x* y); antilinear in the first argument.
Complex gns_inner(const AlgebraElement& x, const AlgebraElement& y);

/// Noncommutative L_p norm (tau(|x|^p))^{1/p}; p = inf gives the operator norm.
double lp_norm(const AlgebraElement& x, double p);

/// |x| = (x* x)^{1/2}, positive semidefinite.
AlgebraElement modulus(const AlgebraElement& x);

/// f(x) for Hermitian-PSD x via eigendecomposition, f(t)=t^alpha.
/// Negative eigenvalues above -1e-7*scale are clipped to zero; worse ones throw.
/// alpha < 0 is the pseudo-inverse power (zero on the numerical kernel).
AlgebraElement pos_power(const AlgebraElement& x, double alpha);

/// Polar decomposition x = u |x| with u a partial isometry (u = U V* from the SVD).
std::pair<AlgebraElement, AlgebraElement> polar_decompose(const AlgebraElement& x);

AlgebraElement hermitian_part(const AlgebraElement& x);       // (x + x*)/2
AlgebraElement antihermitian_part(const AlgebraElement& x);   // (x - x*)/(2i), Hermitian

/// Singular values of every block, paired with the block's tau-weight w_b/n_b.
std::vector<std::pair<double, double>> singular_values(const AlgebraElement& x);

/// Orthogonal projection onto eigenvectors of selfadjoint x with eigenvalue in
/// the closed interval [lo, hi].
ProjectionElement spectral_projection(const AlgebraElement& x, double lo, double hi);

enum class RandomKind { general, selfadjoint, positive, traceless };

AlgebraElement random_element(const AlgebraPtr& algebra, Rng& rng, RandomKind kind);
AlgebraElement random_element(const AlgebraPtr& algebra, std::uint64_t seed, RandomKind kind);

/// kron of per-block matrices into the tensor-product algebra's block layout.
AlgebraElement tensor_element(const AlgebraPtr& product, const AlgebraElement& x,
                              const AlgebraElement& y);

}  // namespace ncsg
