#pragma once

#include "ncsg/semigroup.hpp"

namespace ncsg {

/// Exact finite-horizon Markov dilation for reversible chains: the path space
/// of a discrete-time chain on S states over times {0,...,T}, realized as a
/// commutative tracial algebra over the paths of positive probability (the
/// support; dropping null paths keeps the trace faithful). Embeddings
/// pi_s(f)(omega) = f(omega_s) and conditional expectations onto the first
/// s+1 coordinates are exact sums.
class PathSpace {
public:
  int state_count() const { return states_; }
  int horizon() const { return horizon_; }
  const Eigen::MatrixXd& transition() const { return transition_; }
  const std::vector<double>& stationary() const { return stationary_; }
  int path_count() const { return static_cast<int>(paths_.size()); }
  const std::vector<int>& path(int k) const { return paths_[k]; }
  double path_probability(int k) const { return measure_[k]; }

  const AlgebraPtr& path_algebra() const { return path_algebra_; }
  const AlgebraPtr& state_algebra() const { return state_algebra_; }

private:
  friend PathSpace build_path_space(const Eigen::MatrixXd& transition,
                                    std::optional<std::vector<double>> weights, int horizon);
  int states_ = 0;
  int horizon_ = 0;
  Eigen::MatrixXd transition_;
  std::vector<double> stationary_;
  std::vector<std::vector<int>> paths_;
  std::vector<double> measure_;
  AlgebraPtr path_algebra_;
  AlgebraPtr state_algebra_;
};

/// Validates row-stochasticity and detailed balance w_i P_ij = w_j P_ji
/// (weights computed from P when omitted; the stationary distribution must be
/// unique and strictly positive). S^{T+1} capped at 10^7.
PathSpace build_path_space(const Eigen::MatrixXd& transition,
                           std::optional<std::vector<double>> weights, int horizon);

/// pi_s(f): trace-preserving *-homomorphism from the state algebra into the
/// path algebra, (pi_s f)(omega) = f(omega_s).
AlgebraElement embed(const PathSpace& ps, const AlgebraElement& f, int s);

/// E_{s]}: exact conditional expectation onto functions of omega_0..omega_s.
AlgebraElement conditional_expectation(const PathSpace& ps, const AlgebraElement& g, int s);

/// sup-norm of E_{s]} pi_t(f) - pi_s(P^{t-s} f); the dilation identity makes
/// this vanish to roundoff.
double verify_dilation_identity(const PathSpace& ps, const AlgebraElement& f, int s, int t);

/// P^k f on the state algebra.
AlgebraElement chain_power_apply(const PathSpace& ps, const AlgebraElement& f, int k);

/// The one-step transition map as a superoperator on the state algebra
/// (GNS-symmetric iff the chain is reversible).
Superoperator transition_superoperator(const PathSpace& ps);

}  // namespace ncsg
