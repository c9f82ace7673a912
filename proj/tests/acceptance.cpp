// Acceptance suite: every criterion prints one PASS/FAIL line; the process
// exits with the number of failed criteria. Thresholds are fixed here, not
// calibrated at run time.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ctmcred/reduce.hpp"
#include "ctmcred/solve.hpp"
#include "ctmcred/sp.hpp"
#include "ctmcred/ssa.hpp"
#include "support/fixtures.hpp"
#include "support/model_gen.hpp"
#include "support/oracle_eval.hpp"

using namespace ctmcred;

namespace {

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      notes.push_back(what);
    }
  }
};

struct Reduction {
  Partition p;
  LimitData ld;
  ReducedChain rc;
};

Reduction reduce_model(const ParamCtmc& m) {
  Partition p = classify_states(m);
  LimitData ld = limit_jump_matrix(m, p);
  ReducedChain rc = reduced_generator(ld, p);
  return {std::move(p), std::move(ld), std::move(rc)};
}

// 1. reduction of the counterexample collapses to the zero generator
void criterion_1(Check& c) {
  const Reduction r = reduce_model(fixtures::counterexample());
  c.expect(r.rc.gamma.entries.cwiseAbs().maxCoeff() <= 1e-12,
           "Gamma of the counterexample is not zero");
  c.expect(!reduced_irreducible(r.rc),
           "zero reduced chain reported as irreducible");
}

// 2. stationary distribution of the counterexample at lambda = 10
void criterion_2(Check& c) {
  const Distribution mu =
      stationary_distribution(generator_at(fixtures::counterexample(), 10.0));
  const double expected[4] = {1.0 / 22.0, 1.0 / 22.0, 10.0 / 22.0,
                              10.0 / 22.0};
  for (int i = 0; i < 4; ++i)
    c.expect(std::abs(mu.probs[i] - expected[i]) <= 1e-10,
             "mu[" + std::to_string(i) + "] off by more than 1e-10");
}

// 3. long-time gap at lambda = 1000 sits at lambda/(2(lambda+1))
void criterion_3(Check& c) {
  const ParamCtmc m = fixtures::counterexample();
  const Reduction r = reduce_model(m);
  const Distribution pi = Distribution::delta(r.p.slow, "3");
  const Distribution x = transient_distribution(
      generator_at(m, 1000.0), embed_slow_distribution(pi, r.p), 1e4);
  const Distribution y = transient_distribution(r.rc.gamma, pi, 1e4);
  const double gap = std::abs(x.prob_of("4") - y.prob_of("4"));
  c.expect(gap >= 0.498 && gap <= 0.5005,
           "gap " + std::to_string(gap) + " outside [0.498, 0.5005]");
}

// 4. three-state reduced generator equals the closed form
void criterion_4(Check& c) {
  const Reduction r = reduce_model(fixtures::three_state());
  Eigen::MatrixXd expected(2, 2);
  expected << -5.0, 5.0, 5.0 / 3.0, -5.0 / 3.0;
  c.expect((r.rc.gamma.entries - expected).cwiseAbs().maxCoeff() <= 1e-10,
           "Gamma differs from [[-5,5],[5/3,-5/3]]");
}

// 5. slow start: sup TV falls strictly in lambda and is small at 1e4
void criterion_5(Check& c) {
  const ParamCtmc m = fixtures::three_state();
  const Reduction r = reduce_model(m);
  const Distribution pi = Distribution::delta(r.p.slow, "2");
  double prev = 2.0;
  double last = 0.0;
  for (double lam : {10.0, 100.0, 1000.0, 10000.0}) {
    const SupTvResult s = sup_tv_on_grid(m, lam, r.rc, pi, 0.0, 20.0, 0.01);
    c.expect(s.sup < prev, "sup_tv not strictly decreasing at lambda=" +
                               std::to_string(lam));
    prev = s.sup;
    last = s.sup;
  }
  c.expect(last <= 0.01, "sup_tv at lambda=1e4 is " + std::to_string(last));
}

// 6. fast start: convergence away from zero plus an initial layer at zero
void criterion_6(Check& c) {
  const ParamCtmc m = fixtures::three_state();
  const Reduction r = reduce_model(m);
  const Distribution pi = Distribution::delta(m.states(), "3");
  double prev = 2.0;
  double last = 0.0;
  for (double lam : {10.0, 100.0, 1000.0}) {
    const SupTvResult s = sup_tv_on_grid_general(m, lam, r.rc, r.ld, r.p, pi,
                                                 0.2, 20.0, 0.01);
    c.expect(s.sup < prev, "sup_tv on [0.2,20] not decreasing at lambda=" +
                               std::to_string(lam));
    prev = s.sup;
    last = s.sup;
  }
  c.expect(last <= 0.02, "sup_tv at lambda=1e3 is " + std::to_string(last));
  const SupTvResult layer = sup_tv_on_grid_general(m, 1000.0, r.rc, r.ld, r.p,
                                                   pi, 0.0, 0.05, 0.05 / 2000);
  c.expect(layer.sup > 0.1,
           "no initial layer: gap on [0,0.05] is " + std::to_string(layer.sup));
}

// 7. affine route and general route agree everywhere
void criterion_7(Check& c) {
  auto agree = [&c](const ParamCtmc& m, const std::string& tag) {
    const SpDecomposition d = sp_decompose(m);
    const Partition psp = sp_classify(d);
    const ReducedChain rsp = sp_reduced_generator(d, psp);
    const Reduction r = reduce_model(m);
    c.expect(psp.fast == r.p.fast && psp.slow == r.p.slow,
             tag + ": classifications differ");
    c.expect((rsp.gamma.entries - r.rc.gamma.entries).cwiseAbs().maxCoeff() <=
                 1e-10,
             tag + ": Gamma routes differ beyond 1e-10");
  };
  agree(fixtures::three_state(), "three_state");
  rng::Xoshiro256ss gen(0xACCE77E0u);
  model_gen::Options opt;
  opt.affine_only = true;
  for (int k = 0; k < 100; ++k)
    agree(model_gen::random_model(gen, opt), "random#" + std::to_string(k));
}

// 8. invariant distributions converge once the reduced chain is irreducible
void criterion_8(Check& c) {
  rng::Xoshiro256ss gen(0x1E5701ABu);
  model_gen::Options opt;
  opt.ensure_reduced_irreducible = true;
  auto gap = [](const ParamCtmc& m, const Reduction& r, double lam) {
    const Distribution mu = stationary_distribution(generator_at(m, lam));
    const Distribution mu_b = stationary_distribution(r.rc.gamma);
    double slow_l1 = 0.0, fast_mass = 0.0;
    for (int k = 0; k < r.p.n_slow(); ++k)
      slow_l1 += std::abs(mu.probs[r.p.slow_idx[k]] - mu_b.probs[k]);
    for (int k = 0; k < r.p.n_fast(); ++k)
      fast_mass += mu.probs[r.p.fast_idx[k]];
    return 0.5 * slow_l1 + fast_mass;
  };
  int done = 0;
  while (done < 20) {
    const ParamCtmc m = model_gen::random_model(gen, opt);
    const Reduction r = reduce_model(m);
    if (!reduced_irreducible(r.rc)) continue;
    const double at_small = gap(m, r, 10.0);
    const double at_large = gap(m, r, 1e5);
    c.expect(at_large <= 1e-3, "model " + std::to_string(done) +
                                   ": gap at 1e5 is " +
                                   std::to_string(at_large));
    c.expect(at_large < at_small,
             "model " + std::to_string(done) + ": gap did not shrink");
    ++done;
  }
}

// 9. hitting formula against simulation, and hitting times shrink in lambda
void criterion_9(Check& c) {
  const ParamCtmc m = fixtures::counterexample();
  const Partition p = classify_states(m);
  const Distribution pi = Distribution::delta(m.states(), "1");
  const std::size_t n = 100000;
  const FirstPassageSample fp =
      sample_first_passage(m, 100.0, pi, p, n, 0x900DCAFEu);
  const Distribution formula = first_passage_distribution(m, 100.0, pi);
  for (Eigen::Index i = 0; i < formula.probs.size(); ++i) {
    const double pf = formula.probs[i];
    const double se = std::max(fp.stderr_[i],
                               std::sqrt(pf * (1 - pf) / static_cast<double>(n)));
    c.expect(std::abs(fp.hitting.probs[i] - pf) <= 4.0 * se,
             "state " + formula.labels[i] + " beyond 4 stderr");
  }
  const FirstPassageSample fast =
      sample_first_passage(m, 10000.0, pi, p, n, 0x900DCAFEu);
  c.expect(fast.tau_median < fp.tau_median,
           "median tau_B did not shrink from lambda=1e2 to 1e4");
}

// 10. property suites
void criterion_10(Check& c) {
  // reduced-generator invariants and dominance on 500 random models
  {
    rng::Xoshiro256ss gen(0xBEEF0001u);
    int done = 0;
    while (done < 500) {
      const ParamCtmc m = model_gen::random_model(gen);
      const Partition p = classify_states(m);
      const LimitData ld = limit_jump_matrix(m, p);
      if (!check_slow_reachability(ld, p)) continue;
      const ReducedChain rc = reduced_generator(ld, p);
      for (int i = 0; i < p.n_slow(); ++i) {
        double row = 0.0;
        for (int j = 0; j < p.n_slow(); ++j) {
          row += rc.gamma.entries(i, j);
          if (j != i) {
            c.expect(rc.gamma.entries(i, j) >= 0.0, "negative reduced rate");
            c.expect(rc.gamma.entries(i, j) >= ld.q_BB(i, j) - 1e-12,
                     "reduced rate below the direct limit rate");
          }
        }
        c.expect(std::abs(row) <= 1e-10, "reduced row sum beyond 1e-10");
      }
      ++done;
    }
  }
  // Neumann partial sums meet the LU solve and total hitting mass
  {
    auto neumann = [&c](const ParamCtmc& m) {
      const Partition p = classify_states(m);
      const LimitData ld = limit_jump_matrix(m, p);
      if (p.n_fast() == 0 || !check_slow_reachability(ld, p)) return;
      const int na = p.n_fast();
      const Eigen::MatrixXd inv =
          (Eigen::MatrixXd::Identity(na, na) - ld.omega_AA).inverse();
      Eigen::MatrixXd partial = Eigen::MatrixXd::Identity(na, na);
      Eigen::MatrixXd power = Eigen::MatrixXd::Identity(na, na);
      bool converged = false;
      for (int k = 1; k <= 10000 && !converged; ++k) {
        power = power * ld.omega_AA;
        partial += power;
        converged =
            (partial - inv).cwiseAbs().rowwise().sum().maxCoeff() <= 1e-8;
      }
      c.expect(converged, "Neumann series did not reach 1e-8 in 10000 terms");
      const Eigen::VectorXd mass = (partial * ld.omega_AB).rowwise().sum();
      c.expect((mass.array() >= 1.0 - 1e-8).all() &&
                   (mass.array() <= 1.0 + 1e-8).all(),
               "total first-passage mass is not 1 within 1e-8");
    };
    neumann(fixtures::counterexample());
    neumann(fixtures::three_state());
    neumann(fixtures::mwc());
    rng::Xoshiro256ss gen(0xFEED5EEDu);
    for (int k = 0; k < 40; ++k) neumann(model_gen::random_model(gen));
  }
  // semigroup property
  {
    rng::Xoshiro256ss gen(0x5E66E000u);
    for (const std::string name : {"counterexample", "three_state", "mwc"}) {
      const Generator g = generator_at(fixtures::load(name), 7.0);
      const Distribution pi = Distribution::uniform(g.labels);
      for (int k = 0; k < 5; ++k) {
        const double s = 0.05 + static_cast<double>(gen.next() % 1000) / 250.0;
        const double t = 0.05 + static_cast<double>(gen.next() % 1000) / 250.0;
        const Distribution ab =
            transient_distribution(g, transient_distribution(g, pi, s), t);
        const Distribution once = transient_distribution(g, pi, s + t);
        c.expect((ab.probs - once.probs).cwiseAbs().maxCoeff() <= 1e-9,
                 "semigroup property beyond 1e-9 on " + name);
      }
    }
  }
  // time-regularity bound
  {
    rng::Xoshiro256ss gen(0x7E6A0001u);
    for (const std::string name : {"counterexample", "three_state", "mwc"}) {
      const Generator g = generator_at(fixtures::load(name), 6.0);
      for (int k = 0; k < 20; ++k) {
        const int i = static_cast<int>(gen.next() % g.size());
        const int j = static_cast<int>(gen.next() % g.size());
        const double t = static_cast<double>(gen.next() % 2000) / 500.0;
        const double h = 1e-3 + static_cast<double>(gen.next() % 1000) / 1000.0;
        const Distribution pi = Distribution::delta(g.labels, g.labels[i]);
        const double a = transient_distribution(g, pi, t).probs[j];
        const double b = transient_distribution(g, pi, t + h).probs[j];
        const double bound = 1.0 - std::exp(-g.exit_rate(i) * h);
        c.expect(std::abs(b - a) <= bound + 1e-9,
                 "time-regularity bound violated on " + name);
      }
    }
  }
  // simulation against the exact solver
  {
    const std::size_t n = 50000;
    std::uint64_t seed = 0xD15EA5E0u;
    for (const std::string name : {"counterexample", "three_state", "mwc"}) {
      for (double lam : {1.0, 10.0, 100.0}) {
        const Generator g = generator_at(fixtures::load(name), lam);
        const Distribution pi = Distribution::uniform(g.labels);
        const auto emp = empirical_distribution(g, pi, 1.0, n, ++seed);
        const Distribution exact = transient_distribution(g, pi, 1.0);
        for (Eigen::Index i = 0; i < exact.probs.size(); ++i) {
          const double pe = exact.probs[i];
          const double se =
              std::max(emp.stderr_[i],
                       std::sqrt(pe * (1 - pe) / static_cast<double>(n)));
          c.expect(std::abs(emp.dist.probs[i] - pe) <= 4.0 * se + 1e-12,
                   name + " at lambda=" + std::to_string(lam) +
                       ": simulation beyond 4 stderr");
        }
      }
    }
  }
  // parser round trip against direct interpretation
  {
    rng::Xoshiro256ss gen(0x9A95E000u);
    const std::vector<Rat> points = {Rat(1, 2), Rat(1), Rat(7), Rat(1000)};
    int done = 0;
    while (done < 1000) {
      const std::string text = oracle::random_expr(gen, 3);
      RationalExpr e;
      try {
        e = parse(text);
      } catch (const ZeroDenominator&) {
        continue;
      }
      for (const Rat& x : points) {
        const double direct = to_double(oracle::eval_text(text, x));
        const double lib = e.evaluate(to_double(x));
        c.expect(std::abs(direct - lib) <=
                     1e-9 * std::max(1.0, std::abs(direct)),
                 "parser round trip beyond relative 1e-9: " + text);
      }
      ++done;
    }
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<void(Check&)> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "counterexample reduces to the zero generator", criterion_1},
      {2, "counterexample stationary distribution at lambda=10", criterion_2},
      {3, "counterexample long-time gap matches lambda/(2(lambda+1))",
       criterion_3},
      {4, "three-state reduced generator closed form", criterion_4},
      {5, "slow start: sup TV decreasing in lambda, <= 0.01 at 1e4",
       criterion_5},
      {6, "fast start: convergence after the initial layer", criterion_6},
      {7, "affine route agrees with the general route", criterion_7},
      {8, "invariant distributions converge for irreducible reductions",
       criterion_8},
      {9, "hitting formula matches simulation; hitting times shrink",
       criterion_9},
      {10, "property suites", criterion_10},
  };

  int failures = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.run(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.notes.push_back(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("criterion %2d %s  %s (%.2f s)\n", cr.id,
                check.ok ? "PASS" : "FAIL", cr.title, secs);
    if (!check.ok) {
      ++failures;
      for (const auto& note : check.notes)
        std::printf("             - %s\n", note.c_str());
    }
  }
  return failures;
}
