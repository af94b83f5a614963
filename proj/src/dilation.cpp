#include "ncsg/dilation.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <map>

namespace ncsg {

namespace {

std::vector<double> chain_stationary(const Eigen::MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  Eigen::MatrixXd m = p.transpose() - Eigen::MatrixXd::Identity(n, n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-10);
  if (lu.dimensionOfKernel() != 1)
    throw ValidationError("transition matrix does not have a unique stationary distribution");
  Eigen::VectorXd w = lu.kernel().col(0);
  if (w.sum() < 0) w = -w;
  if (w.minCoeff() <= 0)
    throw ValidationError("stationary distribution is not strictly positive");
  w /= w.sum();
  return std::vector<double>(w.data(), w.data() + n);
}

}  // namespace

PathSpace build_path_space(const Eigen::MatrixXd& transition,
                           std::optional<std::vector<double>> weights, int horizon) {
  const int s = static_cast<int>(transition.rows());
  if (transition.cols() != s) throw std::invalid_argument("transition matrix must be square");
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  for (int i = 0; i < s; ++i) {
    double row = 0.0;
    for (int j = 0; j < s; ++j) {
      if (transition(i, j) < -1e-14)
        throw ValidationError("transition matrix entries must be nonnegative");
      row += transition(i, j);
    }
    if (std::abs(row - 1.0) > 1e-12)
      throw ValidationError("transition matrix rows must sum to 1");
  }
  if (std::pow(double(s), horizon + 1) > 1e7)
    throw std::invalid_argument("path space too large for exact enumeration");

  std::vector<double> w = weights ? *weights : chain_stationary(transition);
  if (static_cast<int>(w.size()) != s)
    throw std::invalid_argument("stationary weight count mismatch");
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      if (std::abs(w[i] * transition(i, j) - w[j] * transition(j, i)) > 1e-12)
        throw ValidationError("detailed balance w_i P_ij = w_j P_ji violated");

  PathSpace ps;
  ps.states_ = s;
  ps.horizon_ = horizon;
  ps.transition_ = transition;
  ps.stationary_ = w;

  // depth-first enumeration of the support
  std::vector<int> cur(horizon + 1, 0);
  std::function<void(int, double)> walk = [&](int depth, double prob) {
    if (prob <= 0.0) return;
    if (depth == horizon + 1) {
      ps.paths_.push_back(cur);
      ps.measure_.push_back(prob);
      return;
    }
    for (int j = 0; j < s; ++j) {
      cur[depth] = j;
      const double step = depth == 0 ? w[j] : transition(cur[depth - 1], j);
      walk(depth + 1, prob * step);
    }
  };
  walk(0, 1.0);

  double total = 0.0;
  for (double m : ps.measure_) total += m;
  if (std::abs(total - 1.0) > 1e-10)
    throw ValidationError("path measure does not sum to 1");
  for (double& m : ps.measure_) m /= total;

  ps.path_algebra_ = TracialAlgebra::commutative(ps.measure_);
  ps.state_algebra_ = TracialAlgebra::commutative(w);
  return ps;
}

AlgebraElement embed(const PathSpace& ps, const AlgebraElement& f, int s) {
  if (s < 0 || s > ps.horizon()) throw std::domain_error("embed: time outside the horizon");
  if (!ps.state_algebra()->same_as(*f.algebra()))
    throw std::invalid_argument("embed expects an element of the state algebra");
  AlgebraElement out(ps.path_algebra());
  for (int k = 0; k < ps.path_count(); ++k)
    out.block(k)(0, 0) = f.block(ps.path(k)[s])(0, 0);
  return out;
}

AlgebraElement conditional_expectation(const PathSpace& ps, const AlgebraElement& g, int s) {
  if (s < 0 || s > ps.horizon())
    throw std::domain_error("conditional_expectation: time outside the horizon");
  if (!ps.path_algebra()->same_as(*g.algebra()))
    throw std::invalid_argument("conditional_expectation expects a path-space element");
  // group paths by the prefix omega_0..omega_s and average with the
  // conditional weights mu(path)/mu(prefix)
  std::map<std::vector<int>, std::pair<Complex, double>> acc;  // prefix -> (sum mu*g, sum mu)
  for (int k = 0; k < ps.path_count(); ++k) {
    std::vector<int> prefix(ps.path(k).begin(), ps.path(k).begin() + s + 1);
    auto& slot = acc[prefix];
    slot.first += ps.path_probability(k) * g.block(k)(0, 0);
    slot.second += ps.path_probability(k);
  }
  AlgebraElement out(ps.path_algebra());
  for (int k = 0; k < ps.path_count(); ++k) {
    std::vector<int> prefix(ps.path(k).begin(), ps.path(k).begin() + s + 1);
    const auto& slot = acc[prefix];
    out.block(k)(0, 0) = slot.first / slot.second;
  }
  return out;
}

AlgebraElement chain_power_apply(const PathSpace& ps, const AlgebraElement& f, int k) {
  if (k < 0) throw std::domain_error("chain power needs k >= 0");
  const int s = ps.state_count();
  Eigen::VectorXcd v(s);
  for (int i = 0; i < s; ++i) v[i] = f.block(i)(0, 0);
  for (int step = 0; step < k; ++step) v = ps.transition().cast<Complex>() * v;
  AlgebraElement out(ps.state_algebra());
  for (int i = 0; i < s; ++i) out.block(i)(0, 0) = v[i];
  return out;
}

double verify_dilation_identity(const PathSpace& ps, const AlgebraElement& f, int s, int t) {
  if (s < 0 || t < s || t > ps.horizon())
    throw std::domain_error("verify_dilation_identity needs 0 <= s <= t <= horizon");
  const AlgebraElement lhs = conditional_expectation(ps, embed(ps, f, t), s);
  const AlgebraElement rhs = embed(ps, chain_power_apply(ps, f, t - s), s);
  return (lhs - rhs).max_abs_entry();
}

Superoperator transition_superoperator(const PathSpace& ps) {
  const int s = ps.state_count();
  Matrix m(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      m(i, j) = ps.transition()(i, j) *
                std::sqrt(ps.stationary()[i] / ps.stationary()[j]);
  return Superoperator(ps.state_algebra(), std::move(m));
}

}  // namespace ncsg
