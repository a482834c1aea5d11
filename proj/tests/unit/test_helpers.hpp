#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "bnp/prior_process.hpp"
#include "oracles.hpp"

inline oracle::Kind oracle_kind(bnp::ProcessKind k) {
  switch (k) {
    case bnp::ProcessKind::Dirichlet: return oracle::Kind::DP;
    case bnp::ProcessKind::PitmanYor: return oracle::Kind::PY;
    case bnp::ProcessKind::Uniform: return oracle::Kind::UP;
  }
  return oracle::Kind::DP;
}

inline oracle::Labels to_oracle(std::span<const bnp::Label> labels) { return {labels.begin(), labels.end()}; }

inline bnp::Partition to_partition(const oracle::Labels& labels) {
  std::vector<bnp::Label> l(labels.begin(), labels.end());
  return bnp::Partition::from_labels(l);
}

// Chi-square statistic upper quantile for p = 0.001 (Wilson-Hilferty).
inline double chi2_critical_001(double dof) {
  const double z = 3.090232;
  const double a = 2.0 / (9.0 * dof);
  const double t = 1.0 - a + z * std::sqrt(a);
  return dof * t * t * t;
}
