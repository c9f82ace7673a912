#pragma once

// Reduction to the slow-state chain: reachability of B under the limit jump
// matrix, the reduced generator Gamma = Q_BB + Q_BA (I - Omega_AA)^-1
// Omega_AB, collapsed initial distributions, and the finite-lambda
// first-passage distribution. The inverse is always applied through an LU
// solve; the Neumann series only appears in tests as an oracle.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ctmcred/classify.hpp"
#include "ctmcred/distribution.hpp"
#include "ctmcred/errors.hpp"
#include "ctmcred/graph.hpp"
#include "ctmcred/model.hpp"

namespace ctmcred {

/// Generator of the reduced chain on the slow states, labels in B order.
struct ReducedChain {
  Generator gamma;
};

namespace detail {

inline Adjacency omega_support(const Eigen::MatrixXd& omega) {
  const int n = static_cast<int>(omega.rows());
  Adjacency adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i && omega(i, j) > 0.0) adj[i].push_back(j);
  return adj;
}

/// True iff every fast state reaches the slow block in the given support
/// digraph (relabeled order, A block first). Decided on the condensation:
/// reachability holds iff every terminal SCC meets B.
inline bool slow_block_reachable(const Adjacency& adj, int n_fast) {
  const SccResult scc = tarjan_scc(adj);
  const std::vector<char> terminal = scc_terminal(adj, scc);
  std::vector<char> has_slow(scc.count, 0);
  for (int v = n_fast; v < static_cast<int>(adj.size()); ++v)
    has_slow[scc.comp[v]] = 1;
  for (int c = 0; c < scc.count; ++c)
    if (terminal[c] && !has_slow[c]) return false;
  return true;
}

/// Solve (I - Omega_AA) X = Omega_AB by LU.
inline Eigen::MatrixXd hitting_matrix(const Eigen::MatrixXd& omega_AA,
                                      const Eigen::MatrixXd& omega_AB) {
  const int na = static_cast<int>(omega_AA.rows());
  if (na == 0) return omega_AB;  // 0 x |B|
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(na, na) - omega_AA;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible())
    throw SingularSystem("I - Omega_AA despite reachability");
  return lu.solve(omega_AB);
}

}  // namespace detail

/// From every fast state the limit jump chain reaches some slow state with
/// probability one; the reduction is defined exactly when this holds.
inline bool check_slow_reachability(const LimitData& ld, const Partition& p) {
  if (p.n_fast() == 0) return true;
  return detail::slow_block_reachable(detail::omega_support(ld.omega),
                                      p.n_fast());
}

inline ReducedChain reduced_generator(const LimitData& ld,
                                      const Partition& p) {
  if (!check_slow_reachability(ld, p))
    throw ReducedChainUndefined(
        "some fast states never reach the slow space in the limit jump chain");

  const Eigen::MatrixXd x = detail::hitting_matrix(ld.omega_AA, ld.omega_AB);
  Eigen::MatrixXd gamma = ld.q_BB;
  if (p.n_fast() > 0) gamma += ld.q_BA * x;

  const int nb = p.n_slow();
  for (int i = 0; i < nb; ++i) {
    double row = 0.0;
    for (int j = 0; j < nb; ++j) {
      if (j != i && gamma(i, j) < 0.0) {
        if (gamma(i, j) < -1e-10)
          throw SingularSystem("reduced generator has a negative rate");
        gamma(i, j) = 0.0;
      }
      row += gamma(i, j);
    }
    if (std::abs(row) > 1e-10)
      throw SingularSystem("reduced generator row sum deviates from 0");
  }
  return ReducedChain{Generator::from_rates(p.slow, gamma)};
}

/// gamma(pi) = pi_B + pi_A (I - Omega_AA)^-1 Omega_AB, the collapsed initial
/// distribution on B.
inline Distribution collapse_distribution(const Distribution& pi,
                                          const LimitData& ld,
                                          const Partition& p) {
  if (pi.labels != p.labels)
    throw LabelMismatch("distribution labels do not match model states");
  if (!check_slow_reachability(ld, p))
    throw ReducedChainUndefined(
        "collapsed distribution needs every fast state to reach B");

  const int na = p.n_fast(), nb = p.n_slow();
  Eigen::RowVectorXd pi_A(na), pi_B(nb);
  for (int i = 0; i < na; ++i) pi_A[i] = pi.probs[p.fast_idx[i]];
  for (int i = 0; i < nb; ++i) pi_B[i] = pi.probs[p.slow_idx[i]];

  Eigen::RowVectorXd g = pi_B;
  if (na > 0)
    g += pi_A * detail::hitting_matrix(ld.omega_AA, ld.omega_AB);
  return make_distribution(p.slow, g.transpose());
}

/// Exact finite-lambda first-passage distribution of B:
/// pi_B + pi_A (I - Omega_AA(lambda))^-1 Omega_AB(lambda).
inline Distribution first_passage_distribution(const ParamCtmc& m,
                                               double lambda,
                                               const Distribution& pi) {
  const Partition p = classify_states(m);
  if (pi.labels != m.states())
    throw LabelMismatch("distribution labels do not match model states");

  const int na = p.n_fast(), nb = p.n_slow();
  Eigen::RowVectorXd pi_B(nb);
  for (int i = 0; i < nb; ++i) pi_B[i] = pi.probs[p.slow_idx[i]];
  if (na == 0) return make_distribution(p.slow, pi_B.transpose());

  const Generator g = generator_at(m, lambda);
  std::vector<int> order;
  for (int i : p.fast_idx) order.push_back(i);
  for (int i : p.slow_idx) order.push_back(i);

  // jump rows are needed for fast states only; reachability is a support
  // question and uses the raw rates
  Adjacency adj(m.size());
  for (int r = 0; r < m.size(); ++r)
    for (int c = 0; c < m.size(); ++c)
      if (c != r && g.entries(order[r], order[c]) > 0.0) adj[r].push_back(c);
  if (!detail::slow_block_reachable(adj, na))
    throw ReducedChainUndefined(
        "fast states cannot reach B in the jump chain at this lambda");

  Eigen::MatrixXd omega_AA(na, na), omega_AB(na, nb);
  for (int r = 0; r < na; ++r) {
    const int i = p.fast_idx[r];
    const double qi = g.exit_rate(i);
    if (!(qi > 0.0))
      throw ReducedChainUndefined("fast state " + m.states()[i] +
                                  " has zero exit rate at this lambda");
    for (int c = 0; c < na; ++c)
      omega_AA(r, c) = c == r ? 0.0 : g.entries(i, p.fast_idx[c]) / qi;
    for (int c = 0; c < nb; ++c)
      omega_AB(r, c) = g.entries(i, p.slow_idx[c]) / qi;
  }

  Eigen::RowVectorXd pi_A(na);
  for (int i = 0; i < na; ++i) pi_A[i] = pi.probs[p.fast_idx[i]];
  Eigen::RowVectorXd h =
      pi_B + pi_A * detail::hitting_matrix(omega_AA, omega_AB);
  return make_distribution(p.slow, h.transpose());
}

/// Strong connectivity of Gamma's support digraph; a one-state chain counts
/// as irreducible.
inline bool reduced_irreducible(const ReducedChain& rc) {
  if (rc.gamma.size() <= 1) return true;
  return strongly_connected(rc.gamma.support());
}

/// Sufficient condition for irreducibility of the reduced chain: the slow
/// states already communicate through Q_BB alone.
inline bool sufficient_condition(const LimitData& ld) {
  const int nb = static_cast<int>(ld.q_BB.rows());
  if (nb <= 1) return true;
  Adjacency adj(nb);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j)
      if (j != i && ld.q_BB(i, j) > 0.0) adj[i].push_back(j);
  return strongly_connected(adj);
}

}  // namespace ctmcred
