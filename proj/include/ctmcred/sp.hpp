#pragma once

// Singularly perturbed specialization: Q(lambda) = lambda*Qtilde + Qhat with
// both parts transition rate matrices. Classification reads Qtilde's
// structure (absorbing = slow, transient = fast) and the reduced generator
// is computed by the block formula Qhat_BB + Qhat_BA (-Qtilde_AA)^-1
// Qtilde_AB. This path shares no intermediate with the general reduction,
// so their agreement is a genuine cross-check.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ctmcred/classify.hpp"
#include "ctmcred/distribution.hpp"
#include "ctmcred/errors.hpp"
#include "ctmcred/expr.hpp"
#include "ctmcred/graph.hpp"
#include "ctmcred/model.hpp"
#include "ctmcred/reduce.hpp"
#include "ctmcred/solve.hpp"

namespace ctmcred {

/// Exact affine split of the rate matrix. Off-diagonals of both parts are
/// nonnegative and diagonals are derived, so lambda*tilde + hat reproduces
/// the generator at every lambda.
struct SpDecomposition {
  std::vector<std::string> labels;
  std::vector<std::vector<Rat>> tilde, hat;  // dense, exact, with diagonals

  int size() const { return static_cast<int>(labels.size()); }

  Rat tilde_exit(int i) const { return -tilde[i][i]; }

  Eigen::MatrixXd tilde_dense() const { return to_dense(tilde); }
  Eigen::MatrixXd hat_dense() const { return to_dense(hat); }

 private:
  static Eigen::MatrixXd to_dense(const std::vector<std::vector<Rat>>& m) {
    const int n = static_cast<int>(m.size());
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = to_double(m[i][j]);
    return d;
  }
};

inline SpDecomposition sp_decompose(const ParamCtmc& m) {
  const int n = m.size();
  SpDecomposition d;
  d.labels = m.states();
  d.tilde.assign(n, std::vector<Rat>(n, Rat(0)));
  d.hat.assign(n, std::vector<Rat>(n, Rat(0)));

  std::vector<std::string> bad;
  for (const auto& [key, expr] : m.rates()) {
    const auto affine = expr.affine_decompose();
    const std::string key_str =
        m.states()[key.first] + "->" + m.states()[key.second];
    if (!affine || affine->first < 0 || affine->second < 0) {
      bad.push_back(key_str);
      continue;
    }
    d.tilde[key.first][key.second] = affine->first;
    d.hat[key.first][key.second] = affine->second;
  }
  if (!bad.empty()) throw NotSingularlyPerturbed(std::move(bad));

  for (int i = 0; i < n; ++i) {
    Rat trow(0), hrow(0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      trow += d.tilde[i][j];
      hrow += d.hat[i][j];
    }
    d.tilde[i][i] = -trow;
    d.hat[i][i] = -hrow;
  }
  return d;
}

/// Slow states are exactly the absorbing states of Qtilde; the remaining
/// (fast) states must all be transient in Qtilde, i.e. no recurrent class of
/// Qtilde may contain two or more states.
inline Partition sp_classify(const SpDecomposition& d) {
  const int n = d.size();
  Partition p;
  p.labels = d.labels;
  for (int i = 0; i < n; ++i) {
    if (d.tilde_exit(i) == 0) {
      p.slow.push_back(d.labels[i]);
      p.slow_idx.push_back(i);
    } else {
      p.fast.push_back(d.labels[i]);
      p.fast_idx.push_back(i);
    }
  }
  if (p.slow.empty()) throw EmptySlowSpace();

  Adjacency adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i && d.tilde[i][j] != 0) adj[i].push_back(j);
  const SccResult scc = tarjan_scc(adj);
  const std::vector<char> terminal = scc_terminal(adj, scc);
  for (int c = 0; c < scc.count; ++c) {
    if (!terminal[c]) continue;
    std::vector<std::string> members;
    for (int v = 0; v < n; ++v)
      if (scc.comp[v] == c && d.tilde_exit(v) != 0)
        members.push_back(d.labels[v]);
    if (!members.empty()) throw FastRecurrentClass(std::move(members));
  }

  p.perm.assign(n, -1);
  int pos = 0;
  for (int i : p.fast_idx) p.perm[i] = pos++;
  for (int i : p.slow_idx) p.perm[i] = pos++;
  return p;
}

inline ReducedChain sp_reduced_generator(const SpDecomposition& d,
                                         const Partition& p) {
  const int na = p.n_fast(), nb = p.n_slow();
  const Eigen::MatrixXd tilde = d.tilde_dense();
  const Eigen::MatrixXd hat = d.hat_dense();

  Eigen::MatrixXd hat_BB(nb, nb), hat_BA(nb, na);
  Eigen::MatrixXd tilde_AA(na, na), tilde_AB(na, nb);
  for (int r = 0; r < nb; ++r) {
    for (int c = 0; c < nb; ++c) hat_BB(r, c) = hat(p.slow_idx[r], p.slow_idx[c]);
    for (int c = 0; c < na; ++c) hat_BA(r, c) = hat(p.slow_idx[r], p.fast_idx[c]);
  }
  for (int r = 0; r < na; ++r) {
    for (int c = 0; c < na; ++c)
      tilde_AA(r, c) = tilde(p.fast_idx[r], p.fast_idx[c]);
    for (int c = 0; c < nb; ++c)
      tilde_AB(r, c) = tilde(p.fast_idx[r], p.slow_idx[c]);
  }

  Eigen::MatrixXd gamma = hat_BB;
  if (na > 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(-tilde_AA);
    if (!lu.isInvertible())
      throw SingularSystem("Qtilde_AA with all fast states transient");
    gamma += hat_BA * lu.solve(tilde_AB);
  }

  for (int i = 0; i < nb; ++i) {
    double row = 0.0;
    for (int j = 0; j < nb; ++j) {
      if (j != i && gamma(i, j) < 0.0) {
        if (gamma(i, j) < -1e-10)
          throw SingularSystem("sp reduced generator has a negative rate");
        gamma(i, j) = 0.0;
      }
      row += gamma(i, j);
    }
    if (std::abs(row) > 1e-10)
      throw SingularSystem("sp reduced generator row sum deviates from 0");
  }
  return ReducedChain{Generator::from_rates(p.slow, gamma)};
}

/// Zero-order outer expansion: gamma(pi) evolved under Gamma. Lives entirely
/// on B; the fast block of the expansion is identically zero.
inline Distribution outer_expansion(const ReducedChain& rc,
                                    const Distribution& gamma_pi, double t) {
  return transient_distribution(rc.gamma, gamma_pi, t);
}

}  // namespace ctmcred
