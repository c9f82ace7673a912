#pragma once

// Exact transient and stationary analysis. Transients go through the
// scaling-and-squaring Pade matrix exponential, whose cost does not grow
// with the stiffness of the generator; uniformization would slow down
// linearly in the largest exit rate. The stationary distribution solves
// mu Q^c = (0,...,0,1) where Q^c replaces the rightmost column of Q by ones.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>
#include <vector>

#include "ctmcred/classify.hpp"
#include "ctmcred/distribution.hpp"
#include "ctmcred/errors.hpp"
#include "ctmcred/model.hpp"
#include "ctmcred/reduce.hpp"

namespace ctmcred {

struct Trajectory {
  std::vector<std::string> labels;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> dists;
};

struct GridSpec {
  double t0 = 0.0;
  double T = 0.0;
  double step = 0.0;
};

struct SweepResult {
  std::vector<double> lambdas;
  std::vector<double> sup_tv;
  std::vector<double> argmax_t;
  GridSpec grid;
};

struct SupTvResult {
  double sup = 0.0;
  double argmax_t = 0.0;
};

namespace detail {

inline Eigen::MatrixXd transition_matrix(const Eigen::MatrixXd& q, double t) {
  Eigen::MatrixXd e = (q * t).exp();
  if (!e.allFinite())
    throw NonFinite("exp(Q t) at t=" + std::to_string(t) +
                    ", ||Q||=" + std::to_string(q.norm()));
  return e;
}

inline Eigen::VectorXd propagate(const Eigen::VectorXd& d,
                                 const Eigen::MatrixXd& trans) {
  Eigen::VectorXd out = (d.transpose() * trans).transpose();
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (out[i] < 0.0) out[i] = 0.0;
  const double s = out.sum();
  if (!(s > 0.0) || !out.allFinite())
    throw NonFinite("propagated distribution lost its mass");
  return out / s;
}

}  // namespace detail

/// pi * exp(t G), renormalized.
inline Distribution transient_distribution(const Generator& g,
                                           const Distribution& pi, double t) {
  if (pi.labels != g.labels)
    throw LabelMismatch("distribution labels do not match generator labels");
  if (t < 0.0) throw std::invalid_argument("transient: t must be >= 0");
  if (t == 0.0) return pi;
  return make_distribution(
      g.labels, detail::propagate(pi.probs, detail::transition_matrix(g.entries, t)));
}

inline Distribution stationary_distribution(const Generator& g) {
  if (!strongly_connected(g.support())) throw NotIrreducible();
  const int n = g.size();
  Eigen::MatrixXd qc = g.entries;
  qc.col(n - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs[n - 1] = 1.0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(qc.transpose());
  if (!lu.isInvertible()) throw SingularSystem("Q^c for the stationary solve");
  Eigen::VectorXd mu = lu.solve(rhs);
  // residual scaled by the generator's magnitude: stiff chains have huge
  // entries and an absolute 1e-10 would sit at the roundoff floor
  const double scale = std::max(1.0, g.entries.cwiseAbs().maxCoeff());
  if ((mu.transpose() * g.entries).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw SingularSystem("stationary residual exceeds 1e-10");
  return make_distribution(g.labels, std::move(mu));
}

/// Total variation distance: half the l1 distance. Labels must agree.
inline double tv_distance(const Distribution& mu, const Distribution& nu) {
  if (mu.labels != nu.labels)
    throw LabelMismatch("total variation needs identical label sets");
  return 0.5 * (mu.probs - nu.probs).cwiseAbs().sum();
}

/// Place a distribution on B onto the full state space, zeros on A, in the
/// model's original state order.
inline Distribution embed_slow_distribution(const Distribution& d,
                                            const Partition& p) {
  if (d.labels != p.slow)
    throw LabelMismatch("distribution labels do not match the slow states");
  Eigen::VectorXd full = Eigen::VectorXd::Zero(p.labels.size());
  for (int i = 0; i < p.n_slow(); ++i) full[p.slow_idx[i]] = d.probs[i];
  return Distribution(p.labels, std::move(full));
}

namespace detail {

/// Grid maximum of d_TV(X_t, Y_t) where X runs under Q(lambda) from pi_S and
/// Y runs under Gamma from y0 (embedded into S for the comparison). Reports
/// the earliest maximizing grid time. A grid estimate, not a certified sup.
inline SupTvResult sup_tv_grid_impl(const ParamCtmc& m, double lambda,
                                    const ReducedChain& rc,
                                    const Partition& p,
                                    const Distribution& pi_S,
                                    const Distribution& y0, double t0,
                                    double T, double step) {
  if (!(t0 >= 0.0) || !(T > t0) || !(step > 0.0))
    throw std::invalid_argument("grid requires 0 <= t0 < T and step > 0");

  const Generator gx = generator_at(m, lambda);
  const Eigen::MatrixXd ex = transition_matrix(gx.entries, step);
  const Eigen::MatrixXd ey = transition_matrix(rc.gamma.entries, step);

  Eigen::VectorXd x = pi_S.probs, y = y0.probs;
  if (t0 > 0.0) {
    x = propagate(x, transition_matrix(gx.entries, t0));
    y = propagate(y, transition_matrix(rc.gamma.entries, t0));
  }

  SupTvResult result{-1.0, t0};
  const long steps =
      static_cast<long>(std::floor((T - t0) / step + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    const Distribution yt = embed_slow_distribution(
        make_distribution(p.slow, y), p);
    const double tv =
        tv_distance(make_distribution(p.labels, x), yt);
    if (tv > result.sup) {
      result.sup = tv;
      result.argmax_t = t0 + static_cast<double>(k) * step;
    }
    x = propagate(x, ex);
    y = propagate(y, ey);
  }
  return result;
}

}  // namespace detail

/// Slow-start comparison: X starts from pi embedded on B, Y starts from pi.
inline SupTvResult sup_tv_on_grid(const ParamCtmc& m, double lambda,
                                  const ReducedChain& rc,
                                  const Distribution& pi_on_B, double t0,
                                  double T, double step) {
  const Partition p = classify_states(m);
  const Distribution pi_S = embed_slow_distribution(pi_on_B, p);
  return detail::sup_tv_grid_impl(m, lambda, rc, p, pi_S, pi_on_B, t0, T,
                                  step);
}

/// General-start comparison: X starts from pi on S, Y starts from the
/// collapsed distribution gamma(pi).
inline SupTvResult sup_tv_on_grid_general(const ParamCtmc& m, double lambda,
                                          const ReducedChain& rc,
                                          const LimitData& ld,
                                          const Partition& p,
                                          const Distribution& pi_on_S,
                                          double t0, double T, double step) {
  const Distribution y0 = collapse_distribution(pi_on_S, ld, p);
  return detail::sup_tv_grid_impl(m, lambda, rc, p, pi_on_S, y0, t0, T, step);
}

/// sup_tv_on_grid per lambda, reduced chain computed once. Results are
/// ordered by the given (increasing) lambda list.
inline SweepResult lambda_sweep(const ParamCtmc& m, const Distribution& pi_on_B,
                                double t0, double T, double step,
                                const std::vector<double>& lambdas) {
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0))
      throw std::invalid_argument("sweep lambdas must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
      throw std::invalid_argument("sweep lambdas must be increasing");
  }
  const Partition p = classify_states(m);
  const LimitData ld = limit_jump_matrix(m, p);
  const ReducedChain rc = reduced_generator(ld, p);

  SweepResult res;
  res.grid = GridSpec{t0, T, step};
  for (double lam : lambdas) {
    const SupTvResult r = sup_tv_on_grid(m, lam, rc, pi_on_B, t0, T, step);
    res.lambdas.push_back(lam);
    res.sup_tv.push_back(r.sup);
    res.argmax_t.push_back(r.argmax_t);
  }
  return res;
}

}  // namespace ctmcred
