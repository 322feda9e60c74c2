#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "cylevy/integral/simple.hpp"
#include "cylevy/levy/condition.hpp"
#include "cylevy/psumming/schwartz.hpp"

namespace cylevy::integral {

/// Weak-norm settings shared by the bound checks. At p = 2 the closed form
/// is used regardless of `weak.estimator`.
struct BoundCheckConfig {
  mc::McConfig mc{};
  levy::WeakNormConfig weak{};
};

namespace detail {

inline levy::WeakNormConfig weak_config_for(const BoundCheckConfig& cfg, ps::NormTag domain, double p,
                                            std::uint64_t stream_offset) {
  levy::WeakNormConfig w = cfg.weak;
  w.ball = ps::dual_ball(domain);
  w.estimator = p == 2.0 ? levy::WeakNormEstimator::closed_form_p2 : levy::WeakNormEstimator::mc_sphere_search;
  w.mc = cfg.mc;
  w.stream_offset = stream_offset;
  return w;
}

/// SE of a·b from independent estimates.
inline double product_se(double a, double a_se, double b, double b_se) { return std::hypot(a_se * b, a * b_se); }

}  // namespace detail

/// (E‖J_{s,t}(Ψ)‖^p)^{1/p} ≤ (E π_p(Ψ)^p)^{1/p}·‖L(t−s)‖_p^*.
inline mc::BoundVerdict verify_radonification_bound(const SimpleOperatorRV& psi, const levy::CylLevySpec& spec,
                                                    double s, double t, double p, const BoundCheckConfig& cfg = {}) {
  psi.validate();
  if (!(s >= 0.0 && s < t)) throw ConfigError("verify_radonification_bound: need 0 <= s < t");
  ps::require_condition(spec, p);
  const auto& mc = cfg.mc;

  struct Sample {
    double norm_p;
    double pi_p;
  };
  const auto samples = mc::parallel_map(mc.n_paths, mc.workers, [&](std::size_t i) {
    mc::RngStream rng(mc.seed, i);
    History history(static_cast<Eigen::Index>(spec.truncation()));
    if (s > 0.0) history.append(s, levy::cyl_increment(spec, s, rng));
    const Radonified r = radonify(psi, s, t, history, spec, rng);
    const auto& op = psi.operators[r.index];
    return Sample{std::pow(ps::norm(r.value, op.codomain_norm()), p), std::pow(ps::pi_p_certified_upper(op, p), p)};
  });
  mc::MomentAccumulator lhs, pis;
  for (const auto& x : samples) {
    lhs.add(x.norm_p);
    pis.add(x.pi_p);
  }
  const mc::MomentEstimate pi_root = mc::to_estimate(pis, p).root();
  const auto w = levy::weak_p_norm(spec, t - s, p,
                                   detail::weak_config_for(cfg, psi.operators.front().domain_norm(), p, mc.n_paths));
  return mc::make_verdict(mc::to_estimate(lhs, p).root(), pi_root.value * w.value,
                          detail::product_se(pi_root.value, pi_root.standard_error, w.value, w.standard_error));
}

/// Martingale-type constant C_p of a Hilbert space: 1 at p ∈ {1, 2}, 2 for
/// 1 < p < 2 (von Bahr–Esseen).
inline double hilbert_martingale_type_constant(double p) { return (p == 1.0 || p == 2.0) ? 1.0 : 2.0; }

struct ContinuityConfig {
  BoundCheckConfig check{};
  std::optional<double> martingale_constant;  ///< overrides C_p
};

struct ContinuityReport {
  double p = 1.0;
  mc::MomentEstimate lhs;        ///< E‖I(Ψ)‖^p
  mc::MomentEstimate lambda;     ///< ‖Ψ‖_Λ
  double b_norm = 0.0;           ///< ‖B(1)‖_{L(E*, R)}
  double rp_norm = 0.0;          ///< ‖M‖_{L(E*, R_p)} over the partition step sizes
  double rp_norm_se = 0.0;
  double c_p = 1.0;
  double drift_bound = 0.0;      ///< T^{p-1}‖B(1)‖^p ‖Ψ‖_Λ^p
  double martingale_bound = 0.0; ///< C_p ‖M‖_{R_p}^p ‖Ψ‖_Λ^p
  double rhs = 0.0;              ///< 2^{p-1}(drift + martingale)
  double rhs_se = 0.0;
  mc::BoundVerdict verdict;
};

/// E‖I(Ψ)‖^p ≤ 2^{p−1}(T^{p−1}‖B(1)‖^p + C_p‖M‖_{R_p}^p)‖Ψ‖_Λ^p.
///
/// The R_p norm is taken over the partition step sizes, which is all the
/// martingale estimate uses. The codomain must be ℓ² unless C_p is given.
inline ContinuityReport verify_integral_continuity(const SimpleIntegrand& psi, const levy::CylLevySpec& spec, double p,
                                                   const ContinuityConfig& cfg = {}) {
  psi.validate();
  if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("verify_integral_continuity: p must lie in [1, 2]");
  ps::require_condition(spec, p);
  if (psi.codomain_norm() != ps::NormTag::l2 && !cfg.martingale_constant)
    throw ConfigError("verify_integral_continuity: C_p is only known for an l2 codomain; pass it explicitly");
  if (p < 2.0 && spec.is_diagonal()) {
    for (const auto& m : spec.diagonal().modes)
      if (const auto* bm = std::get_if<levy::BrownianMotion>(&m); bm && bm->sigma != 0.0)
        throw AssumptionError("verify_integral_continuity: a Gaussian part is not allowed for p < 2");
  }
  const auto& mc = cfg.check.mc;

  ContinuityReport r;
  r.p = p;
  r.c_p = cfg.martingale_constant.value_or(hilbert_martingale_type_constant(p));

  const auto outcomes = mc::parallel_map(mc.n_paths, mc.workers, [&](std::size_t i) {
    mc::RngStream rng(mc.seed, i);
    return simulate_path(psi, spec, p, rng);
  });
  mc::MomentAccumulator lhs, lam;
  for (const auto& o : outcomes) {
    lhs.add(std::pow(ps::norm(o.value, psi.codomain_norm()), p));
    lam.add(o.pi_integral);
  }
  r.lhs = mc::to_estimate(lhs, p);
  const mc::MomentEstimate lambda_p = mc::to_estimate(lam, p);
  r.lambda = lambda_p.root();

  const auto split = drift_martingale_split(spec);
  r.b_norm = ps::norm(split.drift, psi.domain_norm());

  const double big_t = psi.horizon();
  std::vector<double> steps;
  for (std::size_t k = 0; k + 1 < psi.partition.size(); ++k) steps.push_back(psi.partition[k + 1] - psi.partition[k]);
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end(), [](double a, double b) { return b - a <= 1e-12 * b; }), steps.end());
  const auto w = levy::rp_norm_cyl(split.martingale, p, steps,
                                   detail::weak_config_for(cfg.check, psi.domain_norm(), p, 2 * mc.n_paths));
  r.rp_norm = w.value;
  r.rp_norm_se = w.standard_error;

  const double drift_factor = std::pow(big_t, p - 1.0) * std::pow(r.b_norm, p);
  const double mart_factor = r.c_p * std::pow(r.rp_norm, p);
  const double mart_factor_se = r.c_p * p * std::pow(r.rp_norm, p - 1.0) * r.rp_norm_se;
  r.drift_bound = drift_factor * lambda_p.value;
  r.martingale_bound = mart_factor * lambda_p.value;
  const double scale = std::pow(2.0, p - 1.0);
  r.rhs = scale * (r.drift_bound + r.martingale_bound);
  r.rhs_se = scale * detail::product_se(drift_factor + mart_factor, mart_factor_se, lambda_p.value,
                                        lambda_p.standard_error);
  r.verdict = mc::make_verdict(r.lhs, r.rhs, r.rhs_se);
  return r;
}

}  // namespace cylevy::integral
