#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctmcred {

/// Base class of every failure the library raises. Carries a stable
/// machine-readable code alongside the human-readable message so callers
/// (notably the CLI) can map failures without string matching.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// ---- expression layer ----

struct SyntaxError : Error {
  SyntaxError(std::size_t position, const std::string& expected)
      : Error("SyntaxError", "syntax error at position " +
                                 std::to_string(position) + ": expected " +
                                 expected),
        position(position),
        expected(expected) {}
  std::size_t position;
  std::string expected;
};

struct ZeroDenominator : Error {
  ZeroDenominator()
      : Error("ZeroDenominator",
              "expression divides by the zero polynomial") {}
};

struct PoleAtLambda : Error {
  explicit PoleAtLambda(double lambda, const std::string& context = "")
      : Error("PoleAtLambda",
              "denominator vanishes at lambda=" + std::to_string(lambda) +
                  (context.empty() ? "" : " in " + context)),
        lambda(lambda) {}
  double lambda;
};

struct EventuallyNegative : Error {
  EventuallyNegative()
      : Error("EventuallyNegative",
              "expression is negative for all large lambda") {}
};

// ---- model layer ----

struct FormatError : Error {
  explicit FormatError(const std::string& message)
      : Error("FormatError", message) {}
};

struct DuplicateState : Error {
  explicit DuplicateState(const std::string& label)
      : Error("DuplicateState", "duplicate state label \"" + label + "\""),
        label(label) {}
  std::string label;
};

struct UnknownStateInRateKey : Error {
  explicit UnknownStateInRateKey(const std::string& key)
      : Error("UnknownStateInRateKey",
              "rate key \"" + key + "\" names an unknown state"),
        key(key) {}
  std::string key;
};

struct NegativeRate : Error {
  NegativeRate(const std::string& src, const std::string& dst, double lambda)
      : Error("NegativeRate", "rate " + src + "->" + dst +
                                  " is negative at lambda=" +
                                  std::to_string(lambda)),
        src(src),
        dst(dst),
        lambda(lambda) {}
  std::string src, dst;
  double lambda;
};

// ---- classification / reduction ----

struct EmptySlowSpace : Error {
  EmptySlowSpace()
      : Error("EmptySlowSpace", "every state is fast; slow space is empty") {}
};

struct ZeroSlowExitRate : Error {
  explicit ZeroSlowExitRate(const std::string& label)
      : Error("ZeroSlowExitRate",
              "slow state \"" + label + "\" has limit exit rate 0"),
        label(label) {}
  std::string label;
};

struct ReducedChainUndefined : Error {
  explicit ReducedChainUndefined(const std::string& why)
      : Error("ReducedChainUndefined", why) {}
};

struct SingularSystem : Error {
  explicit SingularSystem(const std::string& context)
      : Error("SingularSystem", "singular linear system: " + context) {}
};

struct NotIrreducible : Error {
  NotIrreducible()
      : Error("NotIrreducible",
              "generator support digraph is not strongly connected") {}
};

struct LabelMismatch : Error {
  explicit LabelMismatch(const std::string& detail)
      : Error("LabelMismatch", detail) {}
};

struct NonFinite : Error {
  explicit NonFinite(const std::string& diagnostics)
      : Error("NonFinite", "non-finite value produced: " + diagnostics) {}
};

// ---- singular perturbation ----

struct NotSingularlyPerturbed : Error {
  explicit NotSingularlyPerturbed(std::vector<std::string> keys)
      : Error("NotSingularlyPerturbed", describe(keys)), keys(std::move(keys)) {
  }
  std::vector<std::string> keys;

 private:
  static std::string describe(const std::vector<std::string>& ks) {
    std::string s = "rates are not affine in lambda with nonnegative parts:";
    for (const auto& k : ks) s += " " + k;
    return s;
  }
};

struct FastRecurrentClass : Error {
  explicit FastRecurrentClass(std::vector<std::string> labels)
      : Error("FastRecurrentClass", describe(labels)),
        labels(std::move(labels)) {}
  std::vector<std::string> labels;

 private:
  static std::string describe(const std::vector<std::string>& ls) {
    std::string s = "fast states form a recurrent class:";
    for (const auto& l : ls) s += " " + l;
    return s;
  }
};

// ---- simulation ----

struct PathBudgetExceeded : Error {
  explicit PathBudgetExceeded(std::size_t budget)
      : Error("PathBudgetExceeded",
              "first passage not reached within " + std::to_string(budget) +
                  " jumps"),
        budget(budget) {}
  std::size_t budget;
};

}  // namespace ctmcred
