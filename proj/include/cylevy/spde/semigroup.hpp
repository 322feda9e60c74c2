#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "cylevy/errors.hpp"

namespace cylevy::spde {

/// Diagonal semigroup S(t) = diag(e^{−λ_k t}) generated by A = diag(−λ_k).
struct SemigroupSpec {
  std::vector<double> eigenvalues;
  double m = 1.0;      ///< ‖S(t)‖ ≤ m·e^{ωt}
  double omega = 0.0;

  std::size_t dim() const { return eigenvalues.size(); }

  void validate() const {
    if (eigenvalues.empty()) throw ConfigError("SemigroupSpec: no eigenvalues");
    for (double l : eigenvalues)
      if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("SemigroupSpec: eigenvalues must be finite and >= 0");
    if (!(m >= 1.0)) throw ConfigError("SemigroupSpec: m must be >= 1");
  }

  /// Diagonal of S(t).
  Eigen::VectorXd decay(double t) const {
    if (!(t >= 0.0)) throw ConfigError("SemigroupSpec: t must be >= 0");
    Eigen::VectorXd d(static_cast<Eigen::Index>(dim()));
    for (std::size_t k = 0; k < dim(); ++k) d[static_cast<Eigen::Index>(k)] = std::exp(-eigenvalues[k] * t);
    return d;
  }

  /// ‖S(t)‖ = max_k e^{−λ_k t}.
  double operator_norm(double t) const { return decay(t).maxCoeff(); }
};

inline Eigen::VectorXd semigroup_apply(const SemigroupSpec& semi, double t, const Eigen::VectorXd& v) {
  if (static_cast<std::size_t>(v.size()) != semi.dim()) throw ConfigError("semigroup_apply: dimension mismatch");
  return semi.decay(t).cwiseProduct(v);
}

/// λ_k = k²π², k = 1..K (Dirichlet Laplacian on (0, 1)).
inline SemigroupSpec heat_semigroup(std::size_t k_max) {
  SemigroupSpec s;
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double kk = static_cast<double>(k);
    s.eigenvalues.push_back(kk * kk * std::numbers::pi * std::numbers::pi);
  }
  return s;
}

}  // namespace cylevy::spde
