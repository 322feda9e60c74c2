#pragma once

#include "cylevy/spde/problem.hpp"

namespace cylevy::spde {

/// Heat equation on K modes driven by diagonal compound-Poisson noise with
/// rate 1 and jumps ±1/k:
///   B(x)_k = ½ sin x_k,  G(x) = ½(1 + sin‖x‖)·diag(q),  X₀ ~ 1/k ± 0.1/k (Gaussian).
inline MildProblem heat_demo_problem(std::size_t k_max = 32, double q = 2.0) {
  MildProblem pr;
  pr.semigroup = heat_semigroup(k_max);
  const auto k = static_cast<Eigen::Index>(k_max);
  pr.drift = {DriftKind::sine_diag, Eigen::VectorXd::Constant(k, 0.5), {}};
  pr.diffusion = {DiffusionKind::scalar_factor_diag, Eigen::VectorXd::Constant(k, q), FactorFormula::one_plus_sin, 0.5,
                  {}};
  std::vector<levy::OneDimLevySpec> modes;
  pr.x0.law = InitialLaw::gaussian;
  pr.x0.loc.resize(k);
  pr.x0.scale.resize(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double kk = static_cast<double>(i + 1);
    modes.push_back(levy::CompoundPoisson{1.0, levy::TwoPoint{1.0 / kk}});
    pr.x0.loc[i] = 1.0 / kk;
    pr.x0.scale[i] = 0.1 / kk;
  }
  pr.noise = levy::make_diagonal(modes);
  pr.horizon = 1.0;
  pr.p = 2.0;
  return pr;
}

/// dX = −λX dt + σ dℓ on R¹ with ℓ compound Poisson (rate, jumps ±a).
inline MildProblem additive_linear_problem(double lambda = 1.0, double sigma = 1.0, double x0 = 1.0,
                                           double rate = 4.0, double a = 0.5) {
  MildProblem pr;
  pr.semigroup.eigenvalues = {lambda};
  pr.diffusion = {DiffusionKind::constant_diag, Eigen::VectorXd::Constant(1, sigma), FactorFormula::one_plus_sin, 1.0,
                  {}};
  pr.x0.loc = Eigen::VectorXd::Constant(1, x0);
  pr.noise = levy::make_diagonal({levy::CompoundPoisson{rate, levy::TwoPoint{a}}});
  pr.horizon = 1.0;
  pr.p = 2.0;
  return pr;
}

}  // namespace cylevy::spde
