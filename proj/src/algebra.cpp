#include "ncsg/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace ncsg {

namespace {

constexpr double kWeightSumTol = 1e-12;

void check_block_structure(const std::vector<int>& dims, const std::vector<double>& weights) {
  if (dims.empty()) throw std::invalid_argument("algebra needs at least one block");
  if (dims.size() != weights.size())
    throw std::invalid_argument("block_dims and trace_weights length mismatch");
  for (int n : dims)
    if (n <= 0) throw std::invalid_argument("block dimensions must be positive");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("trace must be faithful: weights strictly positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol)
    throw std::invalid_argument("trace weights must sum to 1 (normalized trace)");
}

}  // namespace

TracialAlgebra::TracialAlgebra(std::vector<int> dims, std::vector<double> weights)
    : dims_(std::move(dims)), weights_(std::move(weights)) {
  offsets_.resize(dims_.size());
  int off = 0;
  for (std::size_t b = 0; b < dims_.size(); ++b) {
    offsets_[b] = off;
    off += dims_[b] * dims_[b];
  }
  gns_dim_ = off;
}

AlgebraPtr TracialAlgebra::full_matrix(int n) {
  return block_diagonal({n}, {1.0});
}

AlgebraPtr TracialAlgebra::commutative(std::vector<double> weights) {
  std::vector<int> dims(weights.size(), 1);
  return block_diagonal(std::move(dims), std::move(weights));
}

AlgebraPtr TracialAlgebra::block_diagonal(std::vector<int> dims, std::vector<double> weights) {
  check_block_structure(dims, weights);
  return AlgebraPtr(new TracialAlgebra(std::move(dims), std::move(weights)));
}

AlgebraPtr TracialAlgebra::tensor_product(const AlgebraPtr& left, const AlgebraPtr& right) {
  std::vector<int> dims;
  std::vector<double> weights;
  for (int a = 0; a < left->block_count(); ++a)
    for (int b = 0; b < right->block_count(); ++b) {
      dims.push_back(left->block_dim(a) * right->block_dim(b));
      weights.push_back(left->trace_weight(a) * right->trace_weight(b));
    }
  // renormalize away roundoff in the weight products
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= sum;
  return block_diagonal(std::move(dims), std::move(weights));
}

bool TracialAlgebra::same_as(const TracialAlgebra& other) const {
  if (dims_ != other.dims_) return false;
  for (std::size_t b = 0; b < weights_.size(); ++b)
    if (std::abs(weights_[b] - other.weights_[b]) > 1e-14) return false;
  return true;
}

bool TracialAlgebra::is_commutative() const {
  return std::all_of(dims_.begin(), dims_.end(), [](int n) { return n == 1; });
}

nlohmann::json TracialAlgebra::to_json() const {
  return nlohmann::json{{"blocks", dims_}, {"weights", weights_}};
}

AlgebraPtr TracialAlgebra::from_json(const nlohmann::json& j) {
  return block_diagonal(j.at("blocks").get<std::vector<int>>(),
                        j.at("weights").get<std::vector<double>>());
}

// ---------------------------------------------------------------------------

AlgebraElement::AlgebraElement(AlgebraPtr algebra) : algebra_(std::move(algebra)) {
  blocks_.reserve(algebra_->block_count());
  for (int b = 0; b < algebra_->block_count(); ++b)
    blocks_.push_back(Matrix::Zero(algebra_->block_dim(b), algebra_->block_dim(b)));
}

AlgebraElement AlgebraElement::identity(const AlgebraPtr& algebra) {
  AlgebraElement x(algebra);
  for (int b = 0; b < algebra->block_count(); ++b)
    x.blocks_[b].setIdentity();
  return x;
}

AlgebraElement AlgebraElement::diagonal(const AlgebraPtr& algebra,
                                        const std::vector<Complex>& entries) {
  AlgebraElement x(algebra);
  std::size_t k = 0;
  for (int b = 0; b < algebra->block_count(); ++b)
    for (int i = 0; i < algebra->block_dim(b); ++i) {
      if (k >= entries.size()) throw std::invalid_argument("diagonal: too few entries");
      x.blocks_[b](i, i) = entries[k++];
    }
  if (k != entries.size()) throw std::invalid_argument("diagonal: too many entries");
  return x;
}

void AlgebraElement::check_same_algebra(const AlgebraElement& rhs) const {
  if (!algebra_->same_as(*rhs.algebra_))
    throw std::invalid_argument("elements belong to different algebras");
}

AlgebraElement AlgebraElement::adjoint() const {
  AlgebraElement y(algebra_);
  for (int b = 0; b < block_count(); ++b) y.blocks_[b] = blocks_[b].adjoint();
  return y;
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& rhs) const {
  check_same_algebra(rhs);
  AlgebraElement y(*this);
  for (int b = 0; b < block_count(); ++b) y.blocks_[b] += rhs.blocks_[b];
  return y;
}

AlgebraElement AlgebraElement::operator-(const AlgebraElement& rhs) const {
  check_same_algebra(rhs);
  AlgebraElement y(*this);
  for (int b = 0; b < block_count(); ++b) y.blocks_[b] -= rhs.blocks_[b];
  return y;
}

AlgebraElement AlgebraElement::operator-() const {
  AlgebraElement y(*this);
  for (int b = 0; b < block_count(); ++b) y.blocks_[b] = -y.blocks_[b];
  return y;
}

AlgebraElement AlgebraElement::operator*(const AlgebraElement& rhs) const {
  check_same_algebra(rhs);
  AlgebraElement y(algebra_);
  for (int b = 0; b < block_count(); ++b) y.blocks_[b] = blocks_[b] * rhs.blocks_[b];
  return y;
}

AlgebraElement& AlgebraElement::operator+=(const AlgebraElement& rhs) {
  check_same_algebra(rhs);
  for (int b = 0; b < block_count(); ++b) blocks_[b] += rhs.blocks_[b];
  return *this;
}

AlgebraElement& AlgebraElement::operator-=(const AlgebraElement& rhs) {
  check_same_algebra(rhs);
  for (int b = 0; b < block_count(); ++b) blocks_[b] -= rhs.blocks_[b];
  return *this;
}

AlgebraElement& AlgebraElement::operator*=(Complex scalar) {
  for (auto& blk : blocks_) blk *= scalar;
  return *this;
}

double AlgebraElement::hermiticity_residual() const {
  double r = 0.0;
  for (const auto& blk : blocks_)
    r = std::max(r, (blk - blk.adjoint().eval()).cwiseAbs().maxCoeff());
  return r;
}

bool AlgebraElement::is_hermitian(double tol) const {
  return hermiticity_residual() <= tol * (1.0 + max_abs_entry());
}

double AlgebraElement::min_eigenvalue() const {
  double m = kInf;
  for (const auto& blk : blocks_) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(blk, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues().minCoeff());
  }
  return m;
}

double AlgebraElement::max_abs_entry() const {
  double m = 0.0;
  for (const auto& blk : blocks_) m = std::max(m, blk.cwiseAbs().maxCoeff());
  return m;
}

GnsVector AlgebraElement::to_gns() const {
  GnsVector v(algebra_->gns_dim());
  for (int b = 0; b < block_count(); ++b) {
    const int n = algebra_->block_dim(b);
    const double scale = std::sqrt(algebra_->trace_weight(b) / n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        v[algebra_->gns_index(b, i, j)] = scale * blocks_[b](i, j);
  }
  return v;
}

AlgebraElement AlgebraElement::from_gns(const AlgebraPtr& algebra, const GnsVector& coords) {
  if (coords.size() != algebra->gns_dim())
    throw std::invalid_argument("GNS coordinate vector has wrong dimension");
  AlgebraElement x(algebra);
  for (int b = 0; b < algebra->block_count(); ++b) {
    const int n = algebra->block_dim(b);
    const double scale = std::sqrt(n / algebra->trace_weight(b));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        x.blocks_[b](i, j) = scale * coords[algebra->gns_index(b, i, j)];
  }
  return x;
}

nlohmann::json AlgebraElement::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& blk : blocks_) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < blk.rows(); ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (int j = 0; j < blk.cols(); ++j)
        row.push_back({blk(i, j).real(), blk(i, j).imag()});
      rows.push_back(std::move(row));
    }
    out.push_back(std::move(rows));
  }
  return out;
}

AlgebraElement AlgebraElement::from_json(const AlgebraPtr& algebra, const nlohmann::json& j) {
  if (!j.is_array() || static_cast<int>(j.size()) != algebra->block_count())
    throw std::invalid_argument("element JSON: block count mismatch");
  AlgebraElement x(algebra);
  for (int b = 0; b < algebra->block_count(); ++b) {
    const int n = algebra->block_dim(b);
    const auto& rows = j[b];
    if (static_cast<int>(rows.size()) != n)
      throw std::invalid_argument("element JSON: block dimension mismatch");
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj) {
        const auto& pair = rows[i][jj];
        x.blocks_[b](i, jj) = Complex(pair.at(0).get<double>(), pair.at(1).get<double>());
      }
  }
  return x;
}

// ---------------------------------------------------------------------------

ProjectionElement ProjectionElement::from_element(AlgebraElement p, double tol) {
  const double scale = 1.0 + p.max_abs_entry();
  if (p.hermiticity_residual() > tol * scale)
    throw std::domain_error("projection must be selfadjoint");
  const AlgebraElement idem = p * p - p;
  if (idem.max_abs_entry() > tol * scale)
    throw std::domain_error("projection must be idempotent");
  const double tr = trace(p).real();
  if (tr < -tol || tr > 1.0 + tol)
    throw std::domain_error("projection trace outside [0,1]");
  return ProjectionElement(std::move(p), std::min(1.0, std::max(0.0, tr)));
}

Complex trace(const AlgebraElement& x) {
  Complex t = 0.0;
  const auto& alg = *x.algebra();
  for (int b = 0; b < alg.block_count(); ++b)
    t += alg.trace_weight(b) / alg.block_dim(b) * x.block(b).trace();
  return t;
}

Complex gns_inner(const AlgebraElement& x, const AlgebraElement& y) {
  return trace(x.adjoint() * y);
}

std::vector<std::pair<double, double>> singular_values(const AlgebraElement& x) {
  std::vector<std::pair<double, double>> out;
  const auto& alg = *x.algebra();
  for (int b = 0; b < alg.block_count(); ++b) {
    const double w = alg.trace_weight(b) / alg.block_dim(b);
    Eigen::JacobiSVD<Matrix> svd(x.block(b));
    for (int i = 0; i < svd.singularValues().size(); ++i)
      out.emplace_back(svd.singularValues()[i], w);
  }
  return out;
}

double lp_norm(const AlgebraElement& x, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& [sigma, w] : singular_values(x)) {
      (void)w;
      m = std::max(m, sigma);
    }
    return m;
  }
  if (!(p >= 1.0)) throw std::domain_error("lp_norm requires p >= 1");
  double acc = 0.0;
  for (const auto& [sigma, w] : singular_values(x)) acc += w * std::pow(sigma, p);
  return std::pow(acc, 1.0 / p);
}

AlgebraElement modulus(const AlgebraElement& x) {
  AlgebraElement y(x.algebra());
  for (int b = 0; b < x.block_count(); ++b) {
    Eigen::JacobiSVD<Matrix> svd(x.block(b), Eigen::ComputeFullU | Eigen::ComputeFullV);
    y.block(b) = svd.matrixV() * svd.singularValues().asDiagonal().toDenseMatrix().cast<Complex>() *
                 svd.matrixV().adjoint();
  }
  return y;
}

AlgebraElement pos_power(const AlgebraElement& x, double alpha) {
  const double scale = 1.0 + x.max_abs_entry();
  if (x.hermiticity_residual() > 1e-8 * scale)
    throw std::domain_error("pos_power requires a selfadjoint element");
  // collect the largest eigenvalue first for the pseudo-inverse rank cut
  double lam_max = 0.0;
  std::vector<Eigen::SelfAdjointEigenSolver<Matrix>> solvers;
  solvers.reserve(x.block_count());
  for (int b = 0; b < x.block_count(); ++b) {
    solvers.emplace_back(x.block(b));
    lam_max = std::max(lam_max, solvers.back().eigenvalues().cwiseAbs().maxCoeff());
  }
  const double rank_tol = 1e-12 * std::max(1.0, lam_max);
  AlgebraElement y(x.algebra());
  for (int b = 0; b < x.block_count(); ++b) {
    const auto& es = solvers[b];
    Eigen::VectorXd lam = es.eigenvalues();
    for (int i = 0; i < lam.size(); ++i) {
      if (lam[i] < -1e-7 * std::max(1.0, lam_max))
        throw std::domain_error("pos_power requires a positive semidefinite element");
      double v = std::max(lam[i], 0.0);
      if (alpha >= 0.0)
        v = (v == 0.0 && alpha == 0.0) ? 0.0 : std::pow(v, alpha);
      else
        v = (v > rank_tol) ? std::pow(v, alpha) : 0.0;
      lam[i] = v;
    }
    y.block(b) = es.eigenvectors() * lam.asDiagonal().toDenseMatrix().cast<Complex>() *
                 es.eigenvectors().adjoint();
  }
  return y;
}

std::pair<AlgebraElement, AlgebraElement> polar_decompose(const AlgebraElement& x) {
  AlgebraElement u(x.algebra()), mod(x.algebra());
  for (int b = 0; b < x.block_count(); ++b) {
    Eigen::JacobiSVD<Matrix> svd(x.block(b), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = 1e-13 * std::max(1.0, sv.size() ? sv[0] : 0.0);
    // partial isometry supported on the numerical range of |x|
    Eigen::VectorXd iso = Eigen::VectorXd::Zero(sv.size());
    for (int i = 0; i < sv.size(); ++i) iso[i] = sv[i] > cut ? 1.0 : 0.0;
    u.block(b) = svd.matrixU() * iso.asDiagonal().toDenseMatrix().cast<Complex>() *
                 svd.matrixV().adjoint();
    mod.block(b) = svd.matrixV() * sv.asDiagonal().toDenseMatrix().cast<Complex>() *
                   svd.matrixV().adjoint();
  }
  return {u, mod};
}

AlgebraElement hermitian_part(const AlgebraElement& x) {
  AlgebraElement y = x + x.adjoint();
  y *= 0.5;
  return y;
}

AlgebraElement antihermitian_part(const AlgebraElement& x) {
  AlgebraElement y = x - x.adjoint();
  y *= Complex(0.0, -0.5);
  return y;
}

ProjectionElement spectral_projection(const AlgebraElement& x, double lo, double hi) {
  const double scale = 1.0 + x.max_abs_entry();
  if (x.hermiticity_residual() > 1e-10 * scale)
    throw std::domain_error("spectral_projection requires a selfadjoint element");
  AlgebraElement p(x.algebra());
  for (int b = 0; b < x.block_count(); ++b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(x.block(b));
    Matrix acc = Matrix::Zero(x.block(b).rows(), x.block(b).cols());
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double lam = es.eigenvalues()[i];
      if (lam >= lo && lam <= hi)
        acc += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    }
    p.block(b) = acc;
  }
  return ProjectionElement::from_element(std::move(p));
}

AlgebraElement random_element(const AlgebraPtr& algebra, Rng& rng, RandomKind kind) {
  AlgebraElement x(algebra);
  for (int b = 0; b < algebra->block_count(); ++b) {
    const int n = algebra->block_dim(b);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) x.block(b)(i, j) = rng.cnormal();
  }
  switch (kind) {
    case RandomKind::general:
      return x;
    case RandomKind::selfadjoint:
      return hermitian_part(x);
    case RandomKind::positive:
      return x.adjoint() * x;
    case RandomKind::traceless: {
      x -= trace(x) * AlgebraElement::identity(algebra);
      return x;
    }
  }
  throw std::invalid_argument("unknown RandomKind");
}

AlgebraElement random_element(const AlgebraPtr& algebra, std::uint64_t seed, RandomKind kind) {
  Rng rng(seed);
  return random_element(algebra, rng, kind);
}

AlgebraElement tensor_element(const AlgebraPtr& product, const AlgebraElement& x,
                              const AlgebraElement& y) {
  const int right_count = y.algebra()->block_count();
  if (product->block_count() != x.algebra()->block_count() * right_count)
    throw std::invalid_argument("tensor_element: product algebra shape mismatch");
  AlgebraElement out(product);
  for (int a = 0; a < x.algebra()->block_count(); ++a)
    for (int b = 0; b < right_count; ++b) {
      const Matrix& xa = x.block(a);
      const Matrix& yb = y.block(b);
      Matrix& blk = out.block(a * right_count + b);
      const int m = static_cast<int>(yb.rows());
      for (int i = 0; i < xa.rows(); ++i)
        for (int j = 0; j < xa.cols(); ++j)
          blk.block(i * m, j * m, m, m) = xa(i, j) * yb;
    }
  return out;
}

}  // namespace ncsg
