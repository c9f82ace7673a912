#pragma once

// Deterministic text emission shared by the CLI and its tests. Numbers are
// printed with 12 significant digits; CSV uses mandatory headers and LF
// line endings.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "ctmcred/distribution.hpp"
#include "ctmcred/solve.hpp"

namespace ctmcred {

inline std::string fmt_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline void write_transient_csv(std::ostream& os, const Trajectory& tr) {
  os << "t";
  for (const auto& label : tr.labels) os << "," << label;
  os << "\n";
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    os << fmt_g12(tr.times[k]);
    for (Eigen::Index i = 0; i < tr.dists[k].size(); ++i)
      os << "," << fmt_g12(tr.dists[k][i]);
    os << "\n";
  }
}

inline void write_sweep_csv(std::ostream& os, const SweepResult& sw) {
  os << "lambda,sup_tv,argmax_t\n";
  for (std::size_t k = 0; k < sw.lambdas.size(); ++k)
    os << fmt_g12(sw.lambdas[k]) << "," << fmt_g12(sw.sup_tv[k]) << ","
       << fmt_g12(sw.argmax_t[k]) << "\n";
}

inline void write_distribution_csv(std::ostream& os, const Distribution& d,
                                   const Eigen::VectorXd& stderr_,
                                   const std::string& value_column) {
  os << "state," << value_column << ",stderr\n";
  for (std::size_t i = 0; i < d.labels.size(); ++i)
    os << d.labels[i] << "," << fmt_g12(d.probs[static_cast<Eigen::Index>(i)])
       << "," << fmt_g12(stderr_[static_cast<Eigen::Index>(i)]) << "\n";
}

}  // namespace ctmcred
