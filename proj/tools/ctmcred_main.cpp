// Command-line front end for the two-time-scale chain reduction library.
//
// Subcommands mirror the pipeline stages: validate, classify, reduce,
// stationary, transient, compare, sweep, simulate, firstpassage, sp.
// Exit codes: 0 success, 1 validation failure, 2 assumption failure,
// 3 I/O or format error. Failures emit machine-readable JSON on stderr.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ctmcred/classify.hpp"
#include "ctmcred/format.hpp"
#include "ctmcred/model.hpp"
#include "ctmcred/reduce.hpp"
#include "ctmcred/solve.hpp"
#include "ctmcred/sp.hpp"
#include "ctmcred/ssa.hpp"

namespace {

using nlohmann::ordered_json;
using namespace ctmcred;

struct RunConfig {
  std::string model_path;
  double lambda = 0.0;
  bool has_lambda = false;
  std::vector<double> lambdas;
  std::string pi_spec;
  double t0 = 0.0;
  double T = 0.0;
  bool has_T = false;
  double step = 0.0;
  bool has_step = false;
  std::uint64_t seed = 0;
  std::size_t n_paths = 10000;
  std::string output_path;
  std::string format = "";  // per-subcommand default
  bool quiet = false;
  bool reduced = false;  // transient: emit the reduced chain's trajectory
};

struct UsageError : Error {
  explicit UsageError(const std::string& message)
      : Error("UsageError", message) {}
};

int exit_code_for(const Error& e) {
  static const std::set<std::string> validation = {
      "NegativeRate", "EmptySlowSpace", "ZeroSlowExitRate", "PoleAtLambda",
      "EventuallyNegative"};
  static const std::set<std::string> assumption = {
      "ReducedChainUndefined", "FastRecurrentClass", "NotSingularlyPerturbed",
      "NotIrreducible",        "SingularSystem",     "NonFinite",
      "PathBudgetExceeded"};
  if (validation.count(e.code())) return 1;
  if (assumption.count(e.code())) return 2;
  return 3;  // format, syntax, I/O, usage
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void emit(const RunConfig& cfg, const std::string& payload) {
  if (!cfg.output_path.empty()) {
    std::ofstream f(cfg.output_path);
    if (!f) throw UsageError("cannot write file: " + cfg.output_path);
    f << payload;
  } else if (!cfg.quiet) {
    std::cout << payload;
  }
}

double require_lambda(const RunConfig& cfg) {
  if (!cfg.has_lambda) throw UsageError("this subcommand needs --lambda");
  if (!(cfg.lambda > 0.0)) throw UsageError("--lambda must be positive");
  return cfg.lambda;
}

GridSpec require_grid(const RunConfig& cfg) {
  if (!cfg.has_T) throw UsageError("this subcommand needs --T");
  GridSpec g;
  g.t0 = cfg.t0;
  g.T = cfg.T;
  g.step = cfg.has_step ? cfg.step : cfg.T / 2000.0;
  if (!(g.t0 >= 0.0) || !(g.T > g.t0) || !(g.step > 0.0))
    throw UsageError("grid needs 0 <= t0 < T and step > 0");
  return g;
}

Distribution resolve_pi(const RunConfig& cfg, const ParamCtmc& m) {
  if (cfg.pi_spec.empty()) {
    if (m.initial()) return *m.initial();
    return Distribution::uniform(m.states());
  }
  if (cfg.pi_spec == "uniform") return Distribution::uniform(m.states());
  for (const auto& s : m.states())
    if (s == cfg.pi_spec) return Distribution::delta(m.states(), s);
  // otherwise a JSON file mapping states to probabilities
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(cfg.pi_spec));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("--pi file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw UsageError("--pi file must map states to probabilities");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(m.size());
  for (const auto& [label, prob] : j.items()) {
    const int i = m.index_of(label);
    p[i] = prob.get<double>();
  }
  if (std::abs(p.sum() - 1.0) > 1e-9)
    throw UsageError("--pi probabilities must sum to 1");
  return make_distribution(m.states(), std::move(p));
}

Distribution restrict_to_slow(const Distribution& pi, const Partition& p) {
  Eigen::VectorXd b(p.n_slow());
  double slow_mass = 0.0;
  for (int i = 0; i < p.n_slow(); ++i) {
    b[i] = pi.probs[p.slow_idx[i]];
    slow_mass += b[i];
  }
  if (std::abs(slow_mass - 1.0) > 1e-12)
    throw UsageError("this subcommand needs --pi concentrated on the slow states");
  return Distribution(p.slow, std::move(b));
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(m(i, j) == 0.0 ? 0.0 : m(i, j));  // drop negative zero
    rows.push_back(row);
  }
  return rows;
}

ordered_json dist_json(const Distribution& d) {
  ordered_json obj = ordered_json::object();
  for (std::size_t i = 0; i < d.labels.size(); ++i)
    obj[d.labels[i]] = d.probs[static_cast<Eigen::Index>(i)];
  return obj;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// ---- subcommand handlers ----

int run_validate(const RunConfig& cfg, const ParamCtmc& m) {
  const ValidationReport rep = validate_model(m);
  ordered_json j;
  j["model"] = m.name();
  j["pass"] = rep.pass;
  j["rates_nonnegative"] = rep.rates_nonnegative;
  j["support_strongly_connected"] = rep.support_strongly_connected;
  j["slow_space_nonempty"] = rep.slow_space_nonempty;
  j["slow_exit_rates_positive"] = rep.slow_exit_rates_positive;
  j["sampled_lambdas"] = rep.sampled_lambdas;
  j["slow_states"] = rep.slow_states;
  j["failures"] = rep.failures;
  emit(cfg, dump(j));
  return rep.pass ? 0 : 1;
}

int run_classify(const RunConfig& cfg, const ParamCtmc& m) {
  const Partition p = classify_states(m);
  ordered_json j;
  j["model"] = m.name();
  j["fast"] = p.fast;
  j["slow"] = p.slow;
  ordered_json order = ordered_json::array();
  for (const auto& s : p.fast) order.push_back(s);
  for (const auto& s : p.slow) order.push_back(s);
  j["relabeled_order"] = order;
  emit(cfg, dump(j));
  return 0;
}

int run_reduce(const RunConfig& cfg, const ParamCtmc& m) {
  const Partition p = classify_states(m);
  const LimitData ld = limit_jump_matrix(m, p);
  const ReducedChain rc = reduced_generator(ld, p);
  const Distribution pi = resolve_pi(cfg, m);
  const Distribution gamma_pi = collapse_distribution(pi, ld, p);
  ordered_json j;
  j["model"] = m.name();
  j["slow"] = p.slow;
  j["gamma"] = matrix_json(rc.gamma.entries);
  j["irreducible"] = reduced_irreducible(rc);
  j["sufficient_condition"] = sufficient_condition(ld);
  j["gamma_pi"] = dist_json(gamma_pi);
  emit(cfg, dump(j));
  return 0;
}

int run_stationary(const RunConfig& cfg, const ParamCtmc& m) {
  const double lambda = require_lambda(cfg);
  const Distribution mu = stationary_distribution(generator_at(m, lambda));
  const Partition p = classify_states(m);
  const LimitData ld = limit_jump_matrix(m, p);
  const ReducedChain rc = reduced_generator(ld, p);
  ordered_json j;
  j["model"] = m.name();
  j["lambda"] = lambda;
  j["mu"] = dist_json(mu);
  const bool irr = reduced_irreducible(rc);
  j["reduced_irreducible"] = irr;
  j["mu_B"] = irr ? dist_json(stationary_distribution(rc.gamma))
                  : ordered_json(nullptr);
  emit(cfg, dump(j));
  return 0;
}

Trajectory grid_trajectory(const Generator& g, const Distribution& pi,
                           const GridSpec& grid) {
  Trajectory tr;
  tr.labels = g.labels;
  const Eigen::MatrixXd estep =
      detail::transition_matrix(g.entries, grid.step);
  Eigen::VectorXd d = pi.probs;
  if (grid.t0 > 0.0)
    d = detail::propagate(d, detail::transition_matrix(g.entries, grid.t0));
  const long steps =
      static_cast<long>(std::floor((grid.T - grid.t0) / grid.step + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    tr.times.push_back(grid.t0 + static_cast<double>(k) * grid.step);
    tr.dists.push_back(d);
    d = detail::propagate(d, estep);
  }
  return tr;
}

int run_transient(const RunConfig& cfg, const ParamCtmc& m) {
  const GridSpec grid = require_grid(cfg);
  const Distribution pi = resolve_pi(cfg, m);
  Trajectory tr;
  if (cfg.reduced) {
    const Partition p = classify_states(m);
    const LimitData ld = limit_jump_matrix(m, p);
    const ReducedChain rc = reduced_generator(ld, p);
    tr = grid_trajectory(rc.gamma, collapse_distribution(pi, ld, p), grid);
  } else {
    tr = grid_trajectory(generator_at(m, require_lambda(cfg)), pi, grid);
  }
  if (cfg.format == "json") {
    ordered_json j;
    j["labels"] = tr.labels;
    j["times"] = tr.times;
    ordered_json dists = ordered_json::array();
    for (const auto& d : tr.dists) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index i = 0; i < d.size(); ++i) row.push_back(d[i]);
      dists.push_back(row);
    }
    j["dists"] = dists;
    emit(cfg, dump(j));
  } else {
    std::ostringstream os;
    write_transient_csv(os, tr);
    emit(cfg, os.str());
  }
  return 0;
}

int run_compare(const RunConfig& cfg, const ParamCtmc& m) {
  const double lambda = require_lambda(cfg);
  const GridSpec grid = require_grid(cfg);
  const Partition p = classify_states(m);
  const LimitData ld = limit_jump_matrix(m, p);
  const ReducedChain rc = reduced_generator(ld, p);
  const Distribution pi = resolve_pi(cfg, m);
  const SupTvResult r = sup_tv_on_grid_general(m, lambda, rc, ld, p, pi,
                                               grid.t0, grid.T, grid.step);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "lambda,sup_tv,argmax_t\n"
       << fmt_g12(lambda) << "," << fmt_g12(r.sup) << ","
       << fmt_g12(r.argmax_t) << "\n";
    emit(cfg, os.str());
  } else {
    ordered_json j;
    j["model"] = m.name();
    j["lambda"] = lambda;
    j["sup_tv"] = r.sup;
    j["argmax_t"] = r.argmax_t;
    j["grid"] = {{"t0", grid.t0}, {"T", grid.T}, {"step", grid.step}};
    emit(cfg, dump(j));
  }
  return 0;
}

int run_sweep(const RunConfig& cfg, const ParamCtmc& m) {
  if (cfg.lambdas.empty()) throw UsageError("sweep needs --lambdas");
  const GridSpec grid = require_grid(cfg);
  const Partition p = classify_states(m);
  const Distribution pi_b = restrict_to_slow(resolve_pi(cfg, m), p);
  const SweepResult sw =
      lambda_sweep(m, pi_b, grid.t0, grid.T, grid.step, cfg.lambdas);
  if (cfg.format == "json") {
    ordered_json j;
    j["model"] = m.name();
    j["lambdas"] = sw.lambdas;
    j["sup_tv"] = sw.sup_tv;
    j["argmax_t"] = sw.argmax_t;
    j["grid"] = {{"t0", sw.grid.t0}, {"T", sw.grid.T}, {"step", sw.grid.step}};
    emit(cfg, dump(j));
  } else {
    std::ostringstream os;
    write_sweep_csv(os, sw);
    emit(cfg, os.str());
  }
  return 0;
}

int run_simulate(const RunConfig& cfg, const ParamCtmc& m) {
  const double lambda = require_lambda(cfg);
  if (!cfg.has_T) throw UsageError("simulate needs --T (time of the snapshot)");
  const Distribution pi = resolve_pi(cfg, m);
  const EmpiricalDistribution emp = empirical_distribution(
      generator_at(m, lambda), pi, cfg.T, cfg.n_paths, cfg.seed);
  if (cfg.format == "json") {
    ordered_json j;
    j["model"] = m.name();
    j["lambda"] = lambda;
    j["t"] = cfg.T;
    j["n_paths"] = emp.n_paths;
    j["seed"] = cfg.seed;
    j["probability"] = dist_json(emp.dist);
    ordered_json se = ordered_json::object();
    for (std::size_t i = 0; i < emp.dist.labels.size(); ++i)
      se[emp.dist.labels[i]] = emp.stderr_[static_cast<Eigen::Index>(i)];
    j["stderr"] = se;
    emit(cfg, dump(j));
  } else {
    std::ostringstream os;
    write_distribution_csv(os, emp.dist, emp.stderr_, "probability");
    emit(cfg, os.str());
  }
  return 0;
}

int run_firstpassage(const RunConfig& cfg, const ParamCtmc& m) {
  const double lambda = require_lambda(cfg);
  const Distribution pi = resolve_pi(cfg, m);
  const Partition p = classify_states(m);
  const Distribution formula = first_passage_distribution(m, lambda, pi);
  const FirstPassageSample sample =
      sample_first_passage(m, lambda, pi, p, cfg.n_paths, cfg.seed);
  if (cfg.format == "csv") {
    std::ostringstream os;
    os << "state,formula_prob,empirical_prob,stderr\n";
    for (std::size_t i = 0; i < formula.labels.size(); ++i) {
      const auto idx = static_cast<Eigen::Index>(i);
      os << formula.labels[i] << "," << fmt_g12(formula.probs[idx]) << ","
         << fmt_g12(sample.hitting.probs[idx]) << ","
         << fmt_g12(sample.stderr_[idx]) << "\n";
    }
    emit(cfg, os.str());
  } else {
    ordered_json j;
    j["model"] = m.name();
    j["lambda"] = lambda;
    j["n_paths"] = sample.n_paths;
    j["seed"] = cfg.seed;
    j["formula"] = dist_json(formula);
    j["empirical"] = dist_json(sample.hitting);
    ordered_json se = ordered_json::object();
    for (std::size_t i = 0; i < sample.hitting.labels.size(); ++i)
      se[sample.hitting.labels[i]] = sample.stderr_[static_cast<Eigen::Index>(i)];
    j["stderr"] = se;
    j["tau"] = {{"q50", sample.tau_median},
                {"q90", sample.tau_q90},
                {"q99", sample.tau_q99}};
    emit(cfg, dump(j));
  }
  return 0;
}

int run_sp(const RunConfig& cfg, const ParamCtmc& m) {
  const SpDecomposition d = sp_decompose(m);
  const Partition psp = sp_classify(d);
  const ReducedChain rsp = sp_reduced_generator(d, psp);

  const Partition p = classify_states(m);
  const LimitData ld = limit_jump_matrix(m, p);
  const ReducedChain rgen = reduced_generator(ld, p);
  const double diff =
      (rsp.gamma.entries - rgen.gamma.entries).cwiseAbs().maxCoeff();

  ordered_json j;
  j["model"] = m.name();
  j["tilde"] = matrix_json(d.tilde_dense());
  j["hat"] = matrix_json(d.hat_dense());
  j["fast"] = psp.fast;
  j["slow"] = psp.slow;
  j["classification_matches_general"] = psp.slow == p.slow;
  j["gamma_sp"] = matrix_json(rsp.gamma.entries);
  j["gamma_general"] = matrix_json(rgen.gamma.entries);
  j["max_abs_diff"] = diff;
  j["consistent"] = diff <= 1e-10 && psp.slow == p.slow;
  emit(cfg, dump(j));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduce two-time-scale continuous-time Markov chains to their "
               "slow-state limit and check the convergence numerically"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--model", cfg.model_path, "model JSON file")->required();
    sub->add_option("--lambda", cfg.lambda, "parameter value")
        ->each([&cfg](const std::string&) { cfg.has_lambda = true; });
    sub->add_option("--lambdas", cfg.lambdas, "comma-separated parameter list")
        ->delimiter(',');
    sub->add_option("--pi", cfg.pi_spec,
                    "initial distribution: STATE, 'uniform', or a JSON file");
    sub->add_option("--t0", cfg.t0, "grid start time");
    sub->add_option("--T", cfg.T, "grid end time / snapshot time")
        ->each([&cfg](const std::string&) { cfg.has_T = true; });
    sub->add_option("--step", cfg.step, "grid step (default T/2000)")
        ->each([&cfg](const std::string&) { cfg.has_step = true; });
    sub->add_option("--seed", cfg.seed, "simulation seed");
    sub->add_option("--paths", cfg.n_paths, "number of simulated paths")
        ->check(CLI::PositiveNumber);
    sub->add_option("--output", cfg.output_path, "write to file instead of stdout");
    sub->add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--quiet", cfg.quiet, "suppress stdout");
    return sub;
  };

  auto* validate = add_common(app.add_subcommand("validate", "check model assumptions"));
  auto* classify = add_common(app.add_subcommand("classify", "fast/slow split"));
  auto* reduce = add_common(app.add_subcommand("reduce", "reduced generator and gamma(pi)"));
  auto* stationary = add_common(app.add_subcommand("stationary", "invariant distributions"));
  auto* transient = add_common(app.add_subcommand("transient", "distribution trajectory on a grid"));
  transient->add_flag("--reduced", cfg.reduced, "trajectory of the reduced chain");
  auto* compare = add_common(app.add_subcommand("compare", "sup total variation on a grid"));
  auto* sweep = add_common(app.add_subcommand("sweep", "compare across a lambda list"));
  auto* simulate = add_common(app.add_subcommand("simulate", "empirical distribution by simulation"));
  auto* firstpassage = add_common(app.add_subcommand("firstpassage", "hitting formula vs simulation"));
  auto* sp = add_common(app.add_subcommand("sp", "affine decomposition cross-check"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    std::cerr << nlohmann::json{{"error", "UsageError"},
                                {"message", e.what()}}
                     .dump()
              << "\n";
    return 3;
  }

  try {
    const ParamCtmc m = load_model(read_file(cfg.model_path));
    if (validate->parsed()) return run_validate(cfg, m);
    if (classify->parsed()) return run_classify(cfg, m);
    if (reduce->parsed()) return run_reduce(cfg, m);
    if (stationary->parsed()) return run_stationary(cfg, m);
    if (transient->parsed()) return run_transient(cfg, m);
    if (compare->parsed()) return run_compare(cfg, m);
    if (sweep->parsed()) return run_sweep(cfg, m);
    if (simulate->parsed()) return run_simulate(cfg, m);
    if (firstpassage->parsed()) return run_firstpassage(cfg, m);
    if (sp->parsed()) return run_sp(cfg, m);
    return 3;
  } catch (const Error& e) {
    std::cerr << nlohmann::json{{"error", e.code()}, {"message", e.what()}}
                     .dump()
              << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}
                     .dump()
              << "\n";
    return 3;
  }
}
