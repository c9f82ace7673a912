#pragma once

// Fast/slow classification by exact symbolic limits of exit rates, and the
// limit jump matrix with its blocks. Limits are decided by degree comparison
// of canonical rational functions, never by numeric extrapolation, so the
// split has no threshold parameter.

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ctmcred/errors.hpp"
#include "ctmcred/expr.hpp"
#include "ctmcred/model.hpp"

namespace ctmcred {

/// Fast set A, slow set B, and the relabeling that puts A first. Indices
/// refer to the model's original state order; `perm[orig] = relabeled`.
struct Partition {
  std::vector<std::string> labels;  // original order, all of S
  std::vector<std::string> fast, slow;
  std::vector<int> fast_idx, slow_idx;  // original indices, model order
  std::vector<int> perm;

  int n_fast() const { return static_cast<int>(fast_idx.size()); }
  int n_slow() const { return static_cast<int>(slow_idx.size()); }
};

inline Partition classify_states(const ParamCtmc& m) {
  Partition p;
  p.labels = m.states();
  for (int i = 0; i < m.size(); ++i) {
    const LimitValue q = m.exit_expr(i).limit_at_infinity();
    if (q.infinite) {
      p.fast.push_back(m.states()[i]);
      p.fast_idx.push_back(i);
    } else {
      if (q.value == 0) throw ZeroSlowExitRate(m.states()[i]);
      p.slow.push_back(m.states()[i]);
      p.slow_idx.push_back(i);
    }
  }
  if (p.slow.empty()) throw EmptySlowSpace();
  p.perm.assign(m.size(), -1);
  int pos = 0;
  for (int i : p.fast_idx) p.perm[i] = pos++;
  for (int i : p.slow_idx) p.perm[i] = pos++;
  return p;
}

/// Limits of the jump matrix Omega and of the slow-row rate blocks, all in
/// relabeled (A then B) order. Entries are exact rationals rounded once to
/// double: Omega rows sum to 1 and (q_BA | q_BB) rows sum to 0 up to that
/// single rounding.
struct LimitData {
  std::vector<std::string> relabeled;  // A labels then B labels
  Eigen::MatrixXd omega;               // |S| x |S|, zero diagonal
  Eigen::MatrixXd omega_AA, omega_AB;
  Eigen::MatrixXd q_BA, q_BB;
};

inline LimitData limit_jump_matrix(const ParamCtmc& m, const Partition& p) {
  const int n = m.size();
  const int na = p.n_fast(), nb = p.n_slow();

  std::vector<int> order;  // relabeled position -> original index
  order.reserve(n);
  for (int i : p.fast_idx) order.push_back(i);
  for (int i : p.slow_idx) order.push_back(i);

  LimitData ld;
  ld.relabeled.reserve(n);
  for (int i : order) ld.relabeled.push_back(m.states()[i]);

  ld.omega = Eigen::MatrixXd::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    const int i = order[r];
    const RationalExpr exit = m.exit_expr(i);
    for (int c = 0; c < n; ++c) {
      if (c == r) continue;
      const RationalExpr* rate = m.rate(i, order[c]);
      if (!rate) continue;
      const LimitValue w = (*rate / exit).limit_at_infinity();
      // omega_ij(lambda) lies in [0,1], so its limit is always finite
      ld.omega(r, c) = to_double(w.value);
    }
  }
  ld.omega_AA = ld.omega.topLeftCorner(na, na);
  ld.omega_AB = ld.omega.topRightCorner(na, nb);

  ld.q_BA = Eigen::MatrixXd::Zero(nb, na);
  ld.q_BB = Eigen::MatrixXd::Zero(nb, nb);
  for (int r = 0; r < nb; ++r) {
    const int i = p.slow_idx[r];
    for (int c = 0; c < na; ++c)
      if (const RationalExpr* rate = m.rate(i, p.fast_idx[c]))
        ld.q_BA(r, c) = to_double(rate->limit_at_infinity().value);
    for (int c = 0; c < nb; ++c)
      if (c != r)
        if (const RationalExpr* rate = m.rate(i, p.slow_idx[c]))
          ld.q_BB(r, c) = to_double(rate->limit_at_infinity().value);
    const LimitValue qi = m.exit_expr(i).limit_at_infinity();
    ld.q_BB(r, r) = -to_double(qi.value);
  }
  return ld;
}

}  // namespace ctmcred
