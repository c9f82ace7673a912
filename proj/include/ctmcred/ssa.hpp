#pragma once

// Exact stochastic simulation (Gillespie): exponential holding times by
// inverse CDF, jump targets from the embedded chain. The generator is
// xoshiro256** seeded through splitmix64; multi-path operations give path k
// the stream seeded with (seed XOR k), so runs are reproducible across
// platforms and path order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ctmcred/classify.hpp"
#include "ctmcred/distribution.hpp"
#include "ctmcred/errors.hpp"
#include "ctmcred/model.hpp"

namespace ctmcred {

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

/// Exponential(rate) by inverse CDF, -ln(1-U)/rate; strictly positive.
inline double exponential(Xoshiro256ss& gen, double rate) {
  double u = gen.uniform01();
  while (u == 0.0) u = gen.uniform01();
  return -std::log1p(-u) / rate;
}

}  // namespace rng

struct PathSample {
  std::vector<double> jump_times;  // strictly increasing, all <= horizon
  std::vector<int> states;         // visited states; size jump_times.size()+1
  double horizon = 0.0;
  std::uint64_t seed = 0;
  bool hit_absorbing = false;  // a zero-exit state froze the path
};

namespace detail {

struct JumpTables {
  std::vector<double> exit;                       // q_i
  std::vector<std::vector<double>> cum;           // cumulative jump probs
  std::vector<std::vector<int>> target;           // matching targets
};

inline JumpTables build_jump_tables(const Generator& g) {
  const int n = g.size();
  JumpTables t;
  t.exit.resize(n);
  t.cum.resize(n);
  t.target.resize(n);
  for (int i = 0; i < n; ++i) {
    t.exit[i] = g.exit_rate(i);
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double q = g.entries(i, j);
      if (q <= 0.0) continue;
      acc += q;
      t.cum[i].push_back(acc);
      t.target[i].push_back(j);
    }
  }
  return t;
}

inline int sample_index(rng::Xoshiro256ss& gen, const std::vector<double>& cum,
                        const std::vector<int>& target) {
  const double u = gen.uniform01() * cum.back();
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  const std::size_t k =
      std::min<std::size_t>(it - cum.begin(), cum.size() - 1);
  return target[k];
}

inline int sample_initial(rng::Xoshiro256ss& gen, const Distribution& pi) {
  const double u = gen.uniform01();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < pi.probs.size(); ++i) {
    acc += pi.probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(pi.probs.size()) - 1;
}

constexpr double kAbsorbingCutoff = 1e-300;

}  // namespace detail

/// One exact path up to horizon T. Deterministic given (g, pi, T, seed).
inline PathSample simulate_path(const Generator& g, const Distribution& pi,
                                double T, std::uint64_t seed) {
  if (pi.labels != g.labels)
    throw LabelMismatch("distribution labels do not match generator labels");
  if (!(T > 0.0)) throw std::invalid_argument("simulate_path: T must be > 0");

  const detail::JumpTables tables = detail::build_jump_tables(g);
  rng::Xoshiro256ss gen(seed);

  PathSample path;
  path.horizon = T;
  path.seed = seed;
  int state = detail::sample_initial(gen, pi);
  path.states.push_back(state);

  double t = 0.0;
  for (;;) {
    if (tables.exit[state] <= detail::kAbsorbingCutoff) {
      path.hit_absorbing = true;
      return path;
    }
    t += rng::exponential(gen, tables.exit[state]);
    if (t > T) return path;
    state = detail::sample_index(gen, tables.cum[state], tables.target[state]);
    path.jump_times.push_back(t);
    path.states.push_back(state);
  }
}

inline int state_at(const PathSample& path, double t) {
  const auto it =
      std::upper_bound(path.jump_times.begin(), path.jump_times.end(), t);
  return path.states[it - path.jump_times.begin()];
}

struct EmpiricalDistribution {
  Distribution dist;
  Eigen::VectorXd stderr_;  // sqrt(p(1-p)/n) per state
  std::size_t n_paths = 0;
};

/// Monte Carlo distribution at time t over n_paths independent paths.
inline EmpiricalDistribution empirical_distribution(const Generator& g,
                                                    const Distribution& pi,
                                                    double t,
                                                    std::size_t n_paths,
                                                    std::uint64_t seed) {
  if (pi.labels != g.labels)
    throw LabelMismatch("distribution labels do not match generator labels");
  if (n_paths < 100)
    throw std::invalid_argument("empirical_distribution: need >= 100 paths");

  const detail::JumpTables tables = detail::build_jump_tables(g);
  const int n = g.size();
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t k = 0; k < n_paths; ++k) {
    rng::Xoshiro256ss gen(seed ^ static_cast<std::uint64_t>(k));
    int state = detail::sample_initial(gen, pi);
    double now = 0.0;
    while (tables.exit[state] > detail::kAbsorbingCutoff) {
      now += rng::exponential(gen, tables.exit[state]);
      if (now > t) break;
      state =
          detail::sample_index(gen, tables.cum[state], tables.target[state]);
    }
    ++counts[state];
  }

  Eigen::VectorXd p(n), se(n);
  for (int i = 0; i < n; ++i) {
    p[i] = static_cast<double>(counts[i]) / static_cast<double>(n_paths);
    se[i] = std::sqrt(p[i] * (1.0 - p[i]) / static_cast<double>(n_paths));
  }
  return EmpiricalDistribution{Distribution(g.labels, std::move(p)),
                               std::move(se), n_paths};
}

struct FirstPassageSample {
  Distribution hitting;     // empirical distribution of X at tau_B, on B
  Eigen::VectorXd stderr_;  // per slow state
  double tau_median = 0.0;
  double tau_q90 = 0.0;
  double tau_q99 = 0.0;
  std::size_t n_paths = 0;
};

/// Sample (tau_B, X_{tau_B}) per path on the finite-lambda chain; tau_B = 0
/// for starts already in B. Paths exceeding the jump budget raise.
inline FirstPassageSample sample_first_passage(const ParamCtmc& m,
                                               double lambda,
                                               const Distribution& pi,
                                               const Partition& p,
                                               std::size_t n_paths,
                                               std::uint64_t seed,
                                               std::size_t jump_budget =
                                                   1000000) {
  if (pi.labels != m.states())
    throw LabelMismatch("distribution labels do not match model states");
  const Generator g = generator_at(m, lambda);
  const detail::JumpTables tables = detail::build_jump_tables(g);

  std::vector<char> is_slow(m.size(), 0);
  for (int i : p.slow_idx) is_slow[i] = 1;
  std::vector<int> slow_pos(m.size(), -1);
  for (int k = 0; k < p.n_slow(); ++k) slow_pos[p.slow_idx[k]] = k;

  std::vector<std::size_t> counts(p.n_slow(), 0);
  std::vector<double> taus;
  taus.reserve(n_paths);
  for (std::size_t k = 0; k < n_paths; ++k) {
    rng::Xoshiro256ss gen(seed ^ static_cast<std::uint64_t>(k));
    int state = detail::sample_initial(gen, pi);
    double tau = 0.0;
    std::size_t jumps = 0;
    while (!is_slow[state]) {
      if (++jumps > jump_budget) throw PathBudgetExceeded(jump_budget);
      tau += rng::exponential(gen, tables.exit[state]);
      state =
          detail::sample_index(gen, tables.cum[state], tables.target[state]);
    }
    ++counts[slow_pos[state]];
    taus.push_back(tau);
  }

  std::sort(taus.begin(), taus.end());
  auto quantile = [&taus](double q) {
    // nearest-rank: smallest value with cumulative fraction >= q
    const std::size_t n = taus.size();
    std::size_t r = static_cast<std::size_t>(std::ceil(q * n));
    if (r > 0) --r;
    return taus[std::min(r, n - 1)];
  };

  Eigen::VectorXd hp(p.n_slow()), se(p.n_slow());
  for (int i = 0; i < p.n_slow(); ++i) {
    hp[i] = static_cast<double>(counts[i]) / static_cast<double>(n_paths);
    se[i] = std::sqrt(hp[i] * (1.0 - hp[i]) / static_cast<double>(n_paths));
  }
  return FirstPassageSample{Distribution(p.slow, std::move(hp)),
                            std::move(se),
                            quantile(0.5),
                            quantile(0.9),
                            quantile(0.99),
                            n_paths};
}

}  // namespace ctmcred
