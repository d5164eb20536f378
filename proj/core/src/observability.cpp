#include "chaincal/observability.hpp"

#include <cmath>

namespace chaincal {

ObservabilityReport observability(const Eigen::MatrixXd& jacobian,
                                  int n_configs, double zero_threshold) {
  if (jacobian.size() == 0)
    throw ConfigError("observability: empty Jacobian");
  if (n_configs <= 0)
    throw ConfigError("observability: configuration count must be positive");

  ObservabilityReport rep;
  rep.n_configs = n_configs;
  rep.m_params = static_cast<int>(jacobian.cols());

  for (Eigen::Index c = 0; c < jacobian.cols(); ++c) {
    const double norm = jacobian.col(c).norm();
    rep.column_norms.push_back(norm);
    if (norm < zero_threshold)
      rep.unidentifiable.push_back(static_cast<int>(c));
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian);
  rep.singular_values = svd.singularValues();
  const Eigen::Index m = rep.singular_values.size();
  const double smax = rep.singular_values[0];
  const double smin = rep.singular_values[m - 1];

  const double rank_tol = std::max(jacobian.rows(), jacobian.cols()) *
                          std::numeric_limits<double>::epsilon() * smax;
  rep.numerical_rank = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (rep.singular_values[i] > rank_tol) ++rep.numerical_rank;

  // Geometric mean via logs to avoid under/overflow across many values.
  double log_sum = 0.0;
  bool any_zero = false;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sv = rep.singular_values[i];
    if (sv <= 0.0) {
      any_zero = true;
      break;
    }
    log_sum += std::log(sv);
  }
  rep.o1 = any_zero ? 0.0
                    : std::exp(log_sum / static_cast<double>(m)) /
                          std::sqrt(static_cast<double>(n_configs));
  rep.o2 = smax > 0.0 ? smin / smax : 0.0;
  rep.o3 = smin;
  rep.o4 = smax > 0.0 ? smin * smin / smax : 0.0;
  rep.near_noise_floor = smin <= 1e-14 * std::max(1.0, smax);
  return rep;
}

}  // namespace chaincal
