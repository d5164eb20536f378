#pragma once

#include <vector>

#include "chaincal/types.hpp"

namespace chaincal {

// Singular-value summary of an identification Jacobian.
//   o1 = (prod sigma_i)^(1/m) / sqrt(n)   (m = parameter count, n = configs)
//   o2 = sigma_min / sigma_max
//   o3 = sigma_min
//   o4 = sigma_min^2 / sigma_max
struct ObservabilityReport {
  Eigen::VectorXd singular_values; // descending
  double o1 = 0.0, o2 = 0.0, o3 = 0.0, o4 = 0.0;
  int n_configs = 0;
  int m_params = 0;
  int numerical_rank = 0;
  std::vector<double> column_norms;
  std::vector<int> unidentifiable;  // columns under the zero threshold
  bool near_noise_floor = false;    // sigma_min within ~1e-14 of zero
};

// n_configs is the number of robot configurations behind the rows (not the
// row count: constraints contribute different row counts per pose).
// zero_threshold flags columns whose norm is below it — parameters the data
// says nothing about. Pass the Jacobian in the scaling you care about
// (scaled internal units or SI); the indices are scaling-sensitive.
ObservabilityReport observability(const Eigen::MatrixXd& jacobian,
                                  int n_configs,
                                  double zero_threshold = 1e-10);

}  // namespace chaincal
