#pragma once

// Parameterized chain: labeled states plus a map of rate expressions. The
// model file is JSON: {"name": ..., "states": [...], "rates": {"a->b": expr,
// ...}, "initial": {...}}. Missing rate keys mean rate identically zero;
// self-loops are rejected and diagonals are always derived.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctmcred/distribution.hpp"
#include "ctmcred/errors.hpp"
#include "ctmcred/expr.hpp"
#include "ctmcred/graph.hpp"

namespace ctmcred {

/// Numeric generator at a fixed lambda: nonnegative off-diagonals, zero row
/// sums within 1e-12, diagonal always derived from the off-diagonal part.
struct Generator {
  std::vector<std::string> labels;
  Eigen::MatrixXd entries;

  int size() const { return static_cast<int>(labels.size()); }

  /// Build from an off-diagonal rate matrix; the diagonal of `rates` is
  /// ignored and replaced by the negative row sum.
  static Generator from_rates(std::vector<std::string> labels,
                              const Eigen::MatrixXd& rates) {
    const int n = static_cast<int>(labels.size());
    Eigen::MatrixXd q = rates;
    for (int i = 0; i < n; ++i) {
      double sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += q(i, j);
      q(i, i) = -sum;
    }
    return Generator{std::move(labels), std::move(q)};
  }

  Adjacency support() const {
    const int n = size();
    Adjacency adj(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (j != i && entries(i, j) > 0.0) adj[i].push_back(j);
    return adj;
  }

  double exit_rate(int i) const { return -entries(i, i); }
};

class ParamCtmc {
 public:
  ParamCtmc(std::string name, std::vector<std::string> states,
            std::map<std::pair<int, int>, RationalExpr> rates,
            std::optional<Distribution> initial = std::nullopt)
      : name_(std::move(name)),
        states_(std::move(states)),
        rates_(std::move(rates)),
        initial_(std::move(initial)) {}

  const std::string& name() const { return name_; }
  const std::vector<std::string>& states() const { return states_; }
  int size() const { return static_cast<int>(states_.size()); }
  const std::optional<Distribution>& initial() const { return initial_; }
  const std::map<std::pair<int, int>, RationalExpr>& rates() const {
    return rates_;
  }

  int index_of(const std::string& label) const {
    for (std::size_t i = 0; i < states_.size(); ++i)
      if (states_[i] == label) return static_cast<int>(i);
    throw LabelMismatch("state \"" + label + "\" not in model");
  }

  /// Rate expression i -> j, or nullptr when the rate is identically zero.
  const RationalExpr* rate(int i, int j) const {
    auto it = rates_.find({i, j});
    return it == rates_.end() ? nullptr : &it->second;
  }

  /// Exact exit-rate expression q_i(lambda) = sum of rates out of i.
  RationalExpr exit_expr(int i) const {
    RationalExpr sum;
    for (int j = 0; j < size(); ++j)
      if (const RationalExpr* r = rate(i, j)) sum = sum + *r;
    return sum;
  }

  /// Digraph of pairs whose rate expression is not identically zero.
  Adjacency support() const {
    Adjacency adj(states_.size());
    for (const auto& [key, expr] : rates_)
      if (!expr.is_zero()) adj[key.first].push_back(key.second);
    return adj;
  }

 private:
  std::string name_;
  std::vector<std::string> states_;
  std::map<std::pair<int, int>, RationalExpr> rates_;
  std::optional<Distribution> initial_;
};

// ---- loading ----

namespace detail {

inline std::pair<std::string, std::string> split_rate_key(
    const std::string& key) {
  const auto pos = key.find("->");
  if (pos == std::string::npos)
    throw FormatError("rate key \"" + key + "\" is not of the form src->dst");
  return {key.substr(0, pos), key.substr(pos + 2)};
}

}  // namespace detail

inline ParamCtmc load_model(const std::string& document) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("model is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("model document must be an object");
  if (!j.contains("states") || !j["states"].is_array())
    throw FormatError("model must have a \"states\" array");
  if (!j.contains("rates") || !j["rates"].is_object())
    throw FormatError("model must have a \"rates\" object");

  std::string name = j.value("name", std::string("unnamed"));

  std::vector<std::string> states;
  for (const auto& s : j["states"]) {
    if (!s.is_string()) throw FormatError("state labels must be strings");
    const std::string label = s.get<std::string>();
    for (const auto& seen : states)
      if (seen == label) throw DuplicateState(label);
    states.push_back(label);
  }
  if (states.size() < 2) throw FormatError("model needs at least 2 states");

  auto index_of = [&states](const std::string& label) -> int {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == label) return static_cast<int>(i);
    return -1;
  };

  std::map<std::pair<int, int>, RationalExpr> rates;
  for (const auto& [key, value] : j["rates"].items()) {
    auto [src, dst] = detail::split_rate_key(key);
    const int i = index_of(src), k = index_of(dst);
    if (i < 0 || k < 0) throw UnknownStateInRateKey(key);
    if (i == k)
      throw FormatError("rate key \"" + key + "\" is a self-loop");
    if (!value.is_string())
      throw FormatError("rate \"" + key + "\" must be an expression string");
    RationalExpr e;
    try {
      e = parse(value.get<std::string>());
    } catch (const SyntaxError& se) {
      throw SyntaxError(se.position, se.expected + " (in rate \"" + key + "\")");
    }
    if (!e.is_zero()) rates.emplace(std::make_pair(i, k), std::move(e));
  }

  std::optional<Distribution> initial;
  if (j.contains("initial")) {
    if (!j["initial"].is_object())
      throw FormatError("\"initial\" must map states to probabilities");
    Eigen::VectorXd p = Eigen::VectorXd::Zero(states.size());
    for (const auto& [label, prob] : j["initial"].items()) {
      const int i = index_of(label);
      if (i < 0)
        throw FormatError("\"initial\" names unknown state \"" + label + "\"");
      if (!prob.is_number() || prob.get<double>() < 0.0)
        throw FormatError("initial probability of \"" + label +
                          "\" must be a nonnegative number");
      p[i] = prob.get<double>();
    }
    if (std::abs(p.sum() - 1.0) > 1e-9)
      throw FormatError("initial probabilities must sum to 1");
    initial = make_distribution(states, std::move(p));
  }

  return ParamCtmc(std::move(name), std::move(states), std::move(rates),
                   std::move(initial));
}

// ---- numeric instantiation ----

inline Generator generator_at(const ParamCtmc& m, double lambda) {
  const int n = m.size();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [key, expr] : m.rates()) {
    double v;
    try {
      v = expr.evaluate(lambda);
    } catch (const PoleAtLambda&) {
      throw PoleAtLambda(lambda, "rate " + m.states()[key.first] + "->" +
                                     m.states()[key.second]);
    }
    if (v < 0.0)
      throw NegativeRate(m.states()[key.first], m.states()[key.second], lambda);
    q(key.first, key.second) = v;
  }
  return Generator::from_rates(m.states(), q);
}

// ---- validation ----

/// Semantic validation per the standing assumptions: sampled nonnegativity of
/// every rate (plus eventual nonnegativity at infinity), strong connectivity
/// of the support digraph, nonempty slow space with positive limit exit
/// rates. Nonnegativity is sampled, not certified over all lambda.
struct ValidationReport {
  bool pass = false;
  bool rates_nonnegative = false;
  bool support_strongly_connected = false;
  bool slow_space_nonempty = false;
  bool slow_exit_rates_positive = false;
  std::vector<double> sampled_lambdas;
  std::vector<std::string> slow_states;  // states with finite limit exit rate
  std::vector<std::string> failures;     // one line per violation
};

inline ValidationReport validate_model(
    const ParamCtmc& m,
    const std::vector<double>& samples = {1.0, 10.0, 1e3, 1e6}) {
  ValidationReport rep;
  rep.sampled_lambdas = samples;

  rep.rates_nonnegative = true;
  for (const auto& [key, expr] : m.rates()) {
    const std::string key_str =
        m.states()[key.first] + "->" + m.states()[key.second];
    for (double lam : samples) {
      try {
        if (expr.eval_exact(Rat(lam)) < 0) {
          rep.rates_nonnegative = false;
          rep.failures.push_back("rate " + key_str + " negative at lambda=" +
                                 std::to_string(lam));
        }
      } catch (const PoleAtLambda&) {
        rep.rates_nonnegative = false;
        rep.failures.push_back("rate " + key_str + " has a pole at lambda=" +
                               std::to_string(lam));
      }
    }
    try {
      expr.limit_at_infinity();
    } catch (const EventuallyNegative&) {
      rep.rates_nonnegative = false;
      rep.failures.push_back("rate " + key_str +
                             " eventually negative as lambda -> infinity");
    }
  }

  rep.support_strongly_connected = strongly_connected(m.support());
  if (!rep.support_strongly_connected)
    rep.failures.push_back("support digraph is not strongly connected");

  for (int i = 0; i < m.size(); ++i) {
    LimitValue q;
    try {
      q = m.exit_expr(i).limit_at_infinity();
    } catch (const EventuallyNegative&) {
      continue;  // already reported through a per-rate failure
    }
    if (q.infinite) continue;
    rep.slow_states.push_back(m.states()[i]);
    if (q.value == 0) {
      rep.failures.push_back("slow state " + m.states()[i] +
                             " has limit exit rate 0");
    }
  }
  rep.slow_space_nonempty = !rep.slow_states.empty();
  if (!rep.slow_space_nonempty)
    rep.failures.push_back("slow state space is empty");
  rep.slow_exit_rates_positive = true;
  for (const auto& f : rep.failures)
    if (f.find("limit exit rate 0") != std::string::npos)
      rep.slow_exit_rates_positive = false;

  rep.pass = rep.rates_nonnegative && rep.support_strongly_connected &&
             rep.slow_space_nonempty && rep.slow_exit_rates_positive;
  return rep;
}

}  // namespace ctmcred
