#pragma once

#include <cmath>

#include "cylevy/levy/condition.hpp"
#include "cylevy/levy/weak_norm.hpp"
#include "cylevy/mc/estimators.hpp"
#include "cylevy/psumming/pi_p.hpp"

namespace cylevy::ps {

/// Unit ball of the dual of the operator's domain, as seen by the weak norm.
inline levy::DualBall dual_ball(NormTag domain) {
  switch (domain) {
    case NormTag::l1: return levy::DualBall::linf;
    case NormTag::linf: return levy::DualBall::l1;
    default: return levy::DualBall::l2;
  }
}

/// Throws AssumptionError unless the weak p-condition holds.
inline void require_condition(const levy::CylLevySpec& spec, double p) {
  const auto report = levy::check_condition(spec, p);
  if (!report.pass) throw AssumptionError("noise fails the weak p-condition: " + report.reason);
}

/// (E‖ψ ΔL‖^p)^{1/p} ≤ π_p(ψ)·‖L(dt)‖_p^*, checked by Monte Carlo.
///
/// The weak norm is taken in closed form at p = 2 and by sphere search
/// otherwise; its standard error enters the slack.
inline mc::BoundVerdict schwartz_bound_check(const FiniteRankOperator& psi, const levy::CylLevySpec& spec, double dt,
                                             double p, const mc::McConfig& mc,
                                             levy::WeakNormConfig weak = {}) {
  if (static_cast<std::size_t>(psi.cols()) != spec.truncation())
    throw ConfigError("schwartz_bound_check: operator domain must match the truncation K");
  require_condition(spec, p);

  const Eigen::MatrixXd increments = levy::sample_increment_matrix(spec, dt, mc);
  const Eigen::MatrixXd images = psi.matrix() * increments;
  mc::MomentAccumulator acc;
  for (Eigen::Index i = 0; i < images.cols(); ++i) acc.add(std::pow(norm(images.col(i), psi.codomain_norm()), p));
  const mc::MomentEstimate lhs = mc::to_estimate(acc, p).root();

  weak.ball = dual_ball(psi.domain_norm());
  if (p == 2.0)
    weak.estimator = levy::WeakNormEstimator::closed_form_p2;
  else {
    weak.estimator = levy::WeakNormEstimator::mc_sphere_search;
    weak.mc = mc;
    weak.stream_offset = mc.n_paths;  // independent of the left side
  }
  const auto w = levy::weak_p_norm(spec, dt, p, weak);
  const double pi = pi_p_certified_upper(psi, p);
  return mc::make_verdict(lhs, pi * w.value, pi * w.standard_error);
}

}  // namespace cylevy::ps
