#include "ncsg/semigroup.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace ncsg {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("Schur vectors must share one dimension");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

}  // namespace

GeneratorSpec GeneratorSpec::schur(std::vector<std::vector<double>> vectors) {
  GeneratorSpec s;
  s.kind = Kind::schur;
  s.schur_vectors = std::move(vectors);
  return s;
}

GeneratorSpec GeneratorSpec::depolarizing(double rate) {
  GeneratorSpec s;
  s.kind = Kind::depolarizing;
  s.rate = rate;
  return s;
}

GeneratorSpec GeneratorSpec::markov_chain(Eigen::MatrixXd q,
                                          std::optional<std::vector<double>> weights) {
  GeneratorSpec s;
  s.kind = Kind::markov_chain;
  s.rate_matrix = std::move(q);
  s.chain_weights = std::move(weights);
  return s;
}

GeneratorSpec GeneratorSpec::tensor_sum(GeneratorSpec l, GeneratorSpec r) {
  GeneratorSpec s;
  s.kind = Kind::tensor_sum;
  s.left = std::make_shared<GeneratorSpec>(std::move(l));
  s.right = std::make_shared<GeneratorSpec>(std::move(r));
  return s;
}

namespace {

std::vector<double> stationary_weights(const Eigen::MatrixXd& q) {
  // left kernel of Q: w Q = 0, normalized, strictly positive, unique
  const int n = static_cast<int>(q.rows());
  Eigen::MatrixXd qt = q.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(qt);
  lu.setThreshold(1e-10);
  if (lu.dimensionOfKernel() != 1)
    throw ValidationError("rate matrix does not have a unique stationary distribution");
  Eigen::VectorXd w = lu.kernel().col(0);
  if (w.sum() < 0) w = -w;
  if (w.minCoeff() <= 0)
    throw ValidationError("stationary distribution is not strictly positive");
  w /= w.sum();
  return std::vector<double>(w.data(), w.data() + n);
}

void validate_rate_matrix(const Eigen::MatrixXd& q, const std::vector<double>& w) {
  const int n = static_cast<int>(q.rows());
  if (q.cols() != n) throw std::invalid_argument("rate matrix must be square");
  const double scale = 1.0 + q.cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i != j && q(i, j) < -1e-12 * scale)
        throw ValidationError("rate matrix needs nonnegative off-diagonal entries");
      row += q(i, j);
    }
    if (std::abs(row) > 1e-10 * scale)
      throw ValidationError("rate matrix rows must sum to zero");
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (std::abs(w[i] * q(i, j) - w[j] * q(j, i)) > 1e-10 * scale)
        throw ValidationError("detailed balance w_i Q_ij = w_j Q_ji violated");
}

}  // namespace

AlgebraPtr GeneratorSpec::natural_algebra() const {
  switch (kind) {
    case Kind::schur:
      return TracialAlgebra::full_matrix(static_cast<int>(schur_vectors.size()));
    case Kind::markov_chain: {
      auto w = chain_weights ? *chain_weights : stationary_weights(rate_matrix);
      return TracialAlgebra::commutative(std::move(w));
    }
    case Kind::tensor_sum:
      return TracialAlgebra::tensor_product(left->natural_algebra(), right->natural_algebra());
    case Kind::depolarizing:
      throw std::invalid_argument("depolarizing generator needs an explicit algebra");
  }
  throw std::invalid_argument("unknown generator kind");
}

nlohmann::json GeneratorSpec::to_json() const {
  switch (kind) {
    case Kind::schur:
      return {{"type", "schur"}, {"vectors", schur_vectors}};
    case Kind::depolarizing:
      return {{"type", "depolarizing"}, {"rate", rate}};
    case Kind::markov_chain: {
      std::vector<std::vector<double>> rows;
      for (int i = 0; i < rate_matrix.rows(); ++i)
        rows.emplace_back(rate_matrix.row(i).begin(), rate_matrix.row(i).end());
      nlohmann::json j = {{"type", "markov_chain"}, {"Q", rows}};
      if (chain_weights) j["weights"] = *chain_weights;
      return j;
    }
    case Kind::tensor_sum:
      return {{"type", "tensor_sum"}, {"left", left->to_json()}, {"right", right->to_json()}};
  }
  throw std::invalid_argument("unknown generator kind");
}

GeneratorSpec GeneratorSpec::from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "schur")
    return schur(j.at("vectors").get<std::vector<std::vector<double>>>());
  if (type == "depolarizing") {
    const double r = j.at("rate").get<double>();
    if (!(r > 0)) throw std::domain_error("depolarizing rate must be positive");
    return depolarizing(r);
  }
  if (type == "markov_chain") {
    const auto rows = j.at("Q").get<std::vector<std::vector<double>>>();
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd q(n, n);
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(rows[i].size()) != n)
        throw std::invalid_argument("rate matrix must be square");
      for (int k = 0; k < n; ++k) q(i, k) = rows[i][k];
    }
    std::optional<std::vector<double>> w;
    if (j.contains("weights")) w = j.at("weights").get<std::vector<double>>();
    return markov_chain(std::move(q), std::move(w));
  }
  if (type == "tensor_sum")
    return tensor_sum(from_json(j.at("left")), from_json(j.at("right")));
  throw std::invalid_argument("unknown generator type: " + type);
}

// ---------------------------------------------------------------------------

Superoperator::Superoperator(AlgebraPtr algebra, Matrix gns_matrix)
    : algebra_(std::move(algebra)), mat_(std::move(gns_matrix)) {
  if (mat_.rows() != algebra_->gns_dim() || mat_.cols() != algebra_->gns_dim())
    throw std::invalid_argument("superoperator matrix does not match the algebra's GNS dimension");
}

Superoperator Superoperator::identity(const AlgebraPtr& algebra) {
  return Superoperator(algebra, Matrix::Identity(algebra->gns_dim(), algebra->gns_dim()));
}

AlgebraElement Superoperator::apply(const AlgebraElement& x) const {
  if (!algebra_->same_as(*x.algebra()))
    throw std::invalid_argument("superoperator applied to an element of a different algebra");
  return AlgebraElement::from_gns(algebra_, mat_ * x.to_gns());
}

AlgebraElement Superoperator::apply_adjoint(const AlgebraElement& x) const {
  if (!algebra_->same_as(*x.algebra()))
    throw std::invalid_argument("superoperator applied to an element of a different algebra");
  return AlgebraElement::from_gns(algebra_, mat_.adjoint() * x.to_gns());
}

Superoperator Superoperator::gns_adjoint() const {
  return Superoperator(algebra_, mat_.adjoint());
}

double Superoperator::symmetry_residual() const {
  const double scale = 1.0 + mat_.norm();
  return (mat_ - mat_.adjoint()).norm() / scale;
}

// ---------------------------------------------------------------------------

Superoperator build_generator(const GeneratorSpec& spec, const AlgebraPtr& algebra) {
  const int d = algebra->gns_dim();
  switch (spec.kind) {
    case GeneratorSpec::Kind::schur: {
      const int n = static_cast<int>(spec.schur_vectors.size());
      if (algebra->block_count() != 1 || algebra->block_dim(0) != n)
        throw std::invalid_argument("Schur generator needs the full matrix algebra M_n");
      Matrix l = Matrix::Zero(d, d);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const int idx = algebra->gns_index(0, i, j);
          l(idx, idx) = sq_dist(spec.schur_vectors[i], spec.schur_vectors[j]);
        }
      return Superoperator(algebra, std::move(l));
    }
    case GeneratorSpec::Kind::depolarizing: {
      if (!(spec.rate > 0)) throw std::domain_error("depolarizing rate must be positive");
      // L = rate (id - tau(.)1): tau(.)1 is the rank-one GNS projector onto
      // the unit vector of the identity element.
      const GnsVector one = AlgebraElement::identity(algebra).to_gns();
      Matrix l = Matrix::Identity(d, d) - one * one.adjoint();
      l *= spec.rate;
      return Superoperator(algebra, std::move(l));
    }
    case GeneratorSpec::Kind::markov_chain: {
      const int n = static_cast<int>(spec.rate_matrix.rows());
      if (!algebra->is_commutative() || algebra->block_count() != n)
        throw std::invalid_argument("Markov chain generator needs a commutative algebra of matching size");
      std::vector<double> w(algebra->trace_weights());
      if (spec.chain_weights) {
        w = *spec.chain_weights;
        for (int i = 0; i < n; ++i)
          if (std::abs(w[i] - algebra->trace_weight(i)) > 1e-12)
            throw std::invalid_argument("chain weights disagree with the algebra's trace weights");
      }
      validate_rate_matrix(spec.rate_matrix, w);
      // (Lf)_i = -sum_j Q_ij f_j; in GNS coordinates xi_i = sqrt(w_i) f_i.
      Matrix l = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          l(i, j) = -spec.rate_matrix(i, j) * std::sqrt(w[i] / w[j]);
      // symmetrize away detailed-balance roundoff
      l = 0.5 * (l + Matrix(l.adjoint()));
      return Superoperator(algebra, std::move(l));
    }
    case GeneratorSpec::Kind::tensor_sum: {
      const AlgebraPtr la = spec.left->natural_algebra();
      const AlgebraPtr ra = spec.right->natural_algebra();
      const AlgebraPtr prod = TracialAlgebra::tensor_product(la, ra);
      if (!prod->same_as(*algebra))
        throw std::invalid_argument("tensor_sum algebra mismatch");
      const Superoperator l1 = build_generator(*spec.left, la);
      const Superoperator l2 = build_generator(*spec.right, ra);
      // L = L1 ⊗ id + id ⊗ L2 under the GNS isomorphism
      // e_alpha ⊗ e_beta  ->  matrix unit of the product block layout.
      const int rc = ra->block_count();
      auto product_index = [&](int a, int i, int j, int b, int k, int q) {
        const int m = ra->block_dim(b);
        return prod->gns_index(a * rc + b, i * m + k, j * m + q);
      };
      Matrix l = Matrix::Zero(d, d);
      for (int a = 0; a < la->block_count(); ++a)
        for (int a2 = 0; a2 < la->block_count(); ++a2)
          for (int i = 0; i < la->block_dim(a); ++i)
            for (int j = 0; j < la->block_dim(a); ++j)
              for (int i2 = 0; i2 < la->block_dim(a2); ++i2)
                for (int j2 = 0; j2 < la->block_dim(a2); ++j2) {
                  const Complex v =
                      l1.matrix()(la->gns_index(a, i, j), la->gns_index(a2, i2, j2));
                  if (v == Complex(0.0)) continue;
                  for (int b = 0; b < rc; ++b)
                    for (int k = 0; k < ra->block_dim(b); ++k)
                      for (int q = 0; q < ra->block_dim(b); ++q)
                        l(product_index(a, i, j, b, k, q),
                          product_index(a2, i2, j2, b, k, q)) += v;
                }
      for (int b = 0; b < rc; ++b)
        for (int b2 = 0; b2 < rc; ++b2)
          for (int k = 0; k < ra->block_dim(b); ++k)
            for (int q = 0; q < ra->block_dim(b); ++q)
              for (int k2 = 0; k2 < ra->block_dim(b2); ++k2)
                for (int q2 = 0; q2 < ra->block_dim(b2); ++q2) {
                  const Complex v =
                      l2.matrix()(ra->gns_index(b, k, q), ra->gns_index(b2, k2, q2));
                  if (v == Complex(0.0)) continue;
                  for (int a = 0; a < la->block_count(); ++a)
                    for (int i = 0; i < la->block_dim(a); ++i)
                      for (int j = 0; j < la->block_dim(a); ++j)
                        l(product_index(a, i, j, b, k, q),
                          product_index(a, i, j, b2, k2, q2)) += v;
                }
      return Superoperator(algebra, std::move(l));
    }
  }
  throw std::invalid_argument("unknown generator kind");
}

// ---------------------------------------------------------------------------

Matrix choi_matrix(const Superoperator& phi) {
  const auto& alg = *phi.algebra();
  int total = 0;
  std::vector<int> base(alg.block_count());
  for (int b = 0; b < alg.block_count(); ++b) {
    base[b] = total;
    total += alg.block_dim(b);
  }
  Matrix choi = Matrix::Zero(total * total, total * total);
  for (int b = 0; b < alg.block_count(); ++b) {
    const int n = alg.block_dim(b);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        AlgebraElement unit(phi.algebra());
        unit.block(b)(i, j) = 1.0;
        const AlgebraElement img = phi.apply(unit);
        const int p = base[b] + i, q = base[b] + j;
        for (int c = 0; c < alg.block_count(); ++c) {
          const int m = alg.block_dim(c);
          for (int r = 0; r < m; ++r)
            for (int s = 0; s < m; ++s)
              choi(p * total + (base[c] + r), q * total + (base[c] + s)) = img.block(c)(r, s);
        }
      }
  }
  return choi;
}

ValidationReport check_standard_map(const Superoperator& phi, std::uint64_t seed, double tol) {
  ValidationReport rep;
  const AlgebraPtr alg = phi.algebra();
  Rng rng(seed);

  {  // complete positivity via the Choi matrix
    const Matrix choi = choi_matrix(phi);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (choi + Matrix(choi.adjoint())),
                                             Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    rep.checks.push_back({"choi_psd", min_eig >= -tol, std::max(0.0, -min_eig)});
  }
  {  // unitality
    const AlgebraElement one = AlgebraElement::identity(alg);
    const double r = (phi.apply(one) - one).max_abs_entry();
    rep.checks.push_back({"unital", r <= tol, r});
  }
  {  // trace-selfadjointness tau(phi(x) y) = tau(x phi(y)) on random pairs
    double worst = 0.0;
    for (int s = 0; s < 6; ++s) {
      const AlgebraElement x = random_element(alg, rng, RandomKind::general);
      const AlgebraElement y = random_element(alg, rng, RandomKind::general);
      const Complex lhs = trace(phi.apply(x) * y);
      const Complex rhs = trace(x * phi.apply(y));
      const double den = 1.0 + std::abs(lhs) + std::abs(rhs);
      worst = std::max(worst, std::abs(lhs - rhs) / den);
    }
    rep.checks.push_back({"trace_selfadjoint", worst <= tol, worst});
  }
  {  // L_p contraction, p in {1, 2, inf}
    for (double p : {1.0, 2.0, kInf}) {
      double worst = 0.0;
      for (int s = 0; s < 6; ++s) {
        const AlgebraElement x = random_element(alg, rng, RandomKind::general);
        const double nx = lp_norm(x, p);
        const double ny = lp_norm(phi.apply(x), p);
        worst = std::max(worst, (ny - nx) / (1.0 + nx));
      }
      const std::string name =
          std::isinf(p) ? "contraction_inf" : (p == 1.0 ? "contraction_1" : "contraction_2");
      rep.checks.push_back({name, worst <= tol, std::max(0.0, worst)});
    }
  }
  return rep;
}

ValidationReport check_standard_semigroup(const Superoperator& generator,
                                          const std::vector<double>& t_samples,
                                          std::uint64_t seed, double tol) {
  ValidationReport rep;
  const double sym = generator.symmetry_residual();
  rep.checks.push_back({"generator_gns_symmetric", sym <= 1e-8, sym});

  Eigen::SelfAdjointEigenSolver<Matrix> es(
      0.5 * (generator.matrix() + Matrix(generator.matrix().adjoint())));
  for (double t : t_samples) {
    if (!(t > 0)) throw std::domain_error("t_samples must be positive");
    Eigen::VectorXcd decay(es.eigenvalues().size());
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      decay[i] = std::exp(-t * es.eigenvalues()[i]);
    Matrix tmat = es.eigenvectors() * decay.asDiagonal() * es.eigenvectors().adjoint();
    Superoperator phi(generator.algebra(), std::move(tmat));
    ValidationReport sub = check_standard_map(phi, mix_seed(seed, std::uint64_t(t * 4096)), tol);
    const std::string suffix = "@t=" + std::to_string(t);
    for (auto& row : sub.checks) {
      row.name += suffix;
      rep.checks.push_back(std::move(row));
    }
  }
  return rep;
}

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRow& c) { return c.pass; });
}

double ValidationReport::worst_residual() const {
  double w = 0.0;
  for (const auto& c : checks) w = std::max(w, c.residual);
  return w;
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : checks)
    rows.push_back({{"check", c.name}, {"pass", c.pass}, {"residual", c.residual}});
  return {{"all_pass", all_pass()}, {"checks", rows}};
}

// ---------------------------------------------------------------------------

SpectralDecomposition eigendecompose(const Superoperator& generator) {
  if (generator.symmetry_residual() > 1e-8)
    throw ValidationError("generator is not GNS-symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      0.5 * (generator.matrix() + Matrix(generator.matrix().adjoint())));
  const Eigen::VectorXd lam = es.eigenvalues();
  const int d = static_cast<int>(lam.size());
  const double lam_max = std::max(1.0, lam.cwiseAbs().maxCoeff());
  if (lam.minCoeff() < -1e-10 * lam_max)
    throw ValidationError("generator spectrum is not positive semidefinite");

  const double zero_tol = 1e-10 * lam_max;
  const double rel_gap = 1e-8;

  SpectralDecomposition dec;
  dec.algebra_ = generator.algebra();
  int i = 0;
  while (i < d) {
    const bool zero_cluster = lam[i] <= zero_tol;
    int j = i + 1;
    if (zero_cluster) {
      while (j < d && lam[j] <= zero_tol) ++j;
    } else {
      while (j < d && lam[j] - lam[j - 1] <= rel_gap * std::max(1.0, lam[j])) ++j;
    }
    Matrix proj = Matrix::Zero(d, d);
    double mean = 0.0;
    for (int k = i; k < j; ++k) {
      proj += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
      mean += lam[k];
    }
    mean /= (j - i);
    if (zero_cluster) {
      dec.kernel_index_ = static_cast<int>(dec.eigenvalues_.size());
      mean = 0.0;
    }
    dec.eigenvalues_.push_back(std::max(0.0, mean));
    dec.projections_.push_back(std::move(proj));
    i = j;
  }
  return dec;
}

double SpectralDecomposition::gap() const {
  for (int k = 0; k < cluster_count(); ++k)
    if (k != kernel_index_) return eigenvalues_[k];
  throw std::domain_error("generator has no nonzero eigenvalue");
}

AlgebraElement SpectralDecomposition::apply_symbol(const std::function<Complex(double)>& f,
                                                   const AlgebraElement& x,
                                                   std::optional<Complex> kernel_value) const {
  const GnsVector xi = x.to_gns();
  GnsVector out = GnsVector::Zero(xi.size());
  for (int k = 0; k < cluster_count(); ++k) {
    const Complex c = (k == kernel_index_ && kernel_value) ? *kernel_value : f(eigenvalues_[k]);
    if (c != Complex(0.0)) out += c * (projections_[k] * xi);
  }
  return AlgebraElement::from_gns(algebra_, out);
}

Matrix SpectralDecomposition::symbol_matrix(const std::function<Complex(double)>& f,
                                            std::optional<Complex> kernel_value) const {
  Matrix out = Matrix::Zero(algebra_->gns_dim(), algebra_->gns_dim());
  for (int k = 0; k < cluster_count(); ++k) {
    const Complex c = (k == kernel_index_ && kernel_value) ? *kernel_value : f(eigenvalues_[k]);
    if (c != Complex(0.0)) out += c * projections_[k];
  }
  return out;
}

AlgebraElement SpectralDecomposition::component(int k, const AlgebraElement& x) const {
  return AlgebraElement::from_gns(algebra_, projections_[k] * x.to_gns());
}

Matrix SpectralDecomposition::range_projector() const {
  Matrix out = Matrix::Identity(algebra_->gns_dim(), algebra_->gns_dim());
  if (kernel_index_ >= 0) out -= projections_[kernel_index_];
  return out;
}

double SpectralDecomposition::kernel_mass(const AlgebraElement& x) const {
  if (kernel_index_ < 0) return 0.0;
  return (projections_[kernel_index_] * x.to_gns()).norm();
}

AlgebraElement fixed_point_projection(const SpectralDecomposition& dec, const AlgebraElement& x) {
  if (dec.kernel_index() < 0) return AlgebraElement(dec.algebra());
  return dec.component(dec.kernel_index(), x);
}

AlgebraElement apply_Tt(const SpectralDecomposition& dec, const AlgebraElement& x, double t) {
  if (t < 0) throw std::domain_error("apply_Tt requires t >= 0");
  if (t == 0.0) return x;
  return dec.apply_symbol([t](double lam) { return Complex(std::exp(-t * lam)); }, x);
}

Superoperator semigroup_map(const SpectralDecomposition& dec, double t) {
  if (t < 0) throw std::domain_error("semigroup_map requires t >= 0");
  return Superoperator(dec.algebra(),
                       dec.symbol_matrix([t](double lam) { return Complex(std::exp(-t * lam)); }));
}

}  // namespace ncsg
