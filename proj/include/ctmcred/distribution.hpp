#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ctmcred/errors.hpp"

namespace ctmcred {

/// Probability vector over labeled states. Entries are nonnegative and sum
/// to 1 within 1e-12; construction enforces both.
struct Distribution {
  std::vector<std::string> labels;
  Eigen::VectorXd probs;

  Distribution(std::vector<std::string> labels_, Eigen::VectorXd probs_)
      : labels(std::move(labels_)), probs(std::move(probs_)) {
    if (static_cast<Eigen::Index>(labels.size()) != probs.size())
      throw LabelMismatch("distribution labels and probabilities differ in size");
    double sum = 0.0;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
      if (!(probs[i] >= 0.0))
        throw NonFinite("negative or NaN probability for state " + labels[i]);
      sum += probs[i];
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw NonFinite("probabilities sum to " + std::to_string(sum));
  }

  static Distribution delta(std::vector<std::string> labels,
                            const std::string& at) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == at) {
        p[static_cast<Eigen::Index>(i)] = 1.0;
        return Distribution(std::move(labels), std::move(p));
      }
    throw LabelMismatch("state \"" + at + "\" not among distribution labels");
  }

  static Distribution uniform(std::vector<std::string> labels) {
    const auto n = labels.size();
    Eigen::VectorXd p =
        Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
    return Distribution(std::move(labels), std::move(p));
  }

  double prob_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return probs[static_cast<Eigen::Index>(i)];
    throw LabelMismatch("state \"" + label + "\" not among distribution labels");
  }
};

/// Clamp roundoff debris and renormalize; used after floating-point ops that
/// are mathematically probability-preserving.
inline Distribution make_distribution(std::vector<std::string> labels,
                                      Eigen::VectorXd raw) {
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i]))
      throw NonFinite("probability entry " + std::to_string(i));
    if (raw[i] < 0.0) raw[i] = 0.0;
  }
  const double sum = raw.sum();
  if (!(sum > 0.0)) throw NonFinite("probability mass vanished");
  raw /= sum;
  return Distribution(std::move(labels), std::move(raw));
}

}  // namespace ctmcred
