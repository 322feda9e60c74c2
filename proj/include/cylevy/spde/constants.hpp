#pragma once

#include <cmath>
#include <optional>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cylevy/integral/verify.hpp"
#include "cylevy/spde/problem.hpp"

namespace cylevy::spde {

inline constexpr double kQuadratureTol = 1e-8;

/// ∫_a^b f by adaptive Gauss–Kronrod at relative tolerance 1e-8.
template <class F>
double integrate(F&& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, kQuadratureTol);
}

/// Continuity constant of the stochastic integral for the given noise:
/// E‖∫Ψ dL‖^p ≤ c‖Ψ‖_Λ^p with c = 2^{p−1}(T^{p−1}‖b‖^p + C_p‖M‖_{R_p}^p).
/// The R_p norm is exact at p = 2 and a Monte Carlo estimate on `steps`
/// otherwise.
struct NoiseConstant {
  double c = 0.0;
  double drift_part = 0.0;
  double martingale_part = 0.0;
  bool empirical = false;
};

inline NoiseConstant noise_continuity_constant(const levy::CylLevySpec& noise, double p, double horizon,
                                               const std::vector<double>& steps, const mc::McConfig& mc = {}) {
  ps::require_condition(noise, p);
  if (p < 2.0 && noise.is_diagonal())
    for (const auto& m : noise.diagonal().modes)
      if (const auto* bm = std::get_if<levy::BrownianMotion>(&m); bm && bm->sigma != 0.0)
        throw AssumptionError("noise_continuity_constant: a Gaussian part is not allowed for p < 2");
  const auto split = integral::drift_martingale_split(noise);
  integral::BoundCheckConfig check;
  check.mc = mc;
  const auto w = levy::rp_norm_cyl(split.martingale, p, steps,
                                   integral::detail::weak_config_for(check, ps::NormTag::l2, p, 0));
  NoiseConstant out;
  out.drift_part = std::pow(horizon, p - 1.0) * std::pow(split.drift.norm(), p);
  out.martingale_part = integral::hilbert_martingale_type_constant(p) * std::pow(w.value, p);
  out.c = std::pow(2.0, p - 1.0) * (out.drift_part + out.martingale_part);
  out.empirical = !w.closed_form;
  return out;
}

struct ContractionConstants {
  double beta = 0.0;
  double c_beta = 0.0;        ///< C(β) = (∫b)^{p−1} ∫ b(s)e^{−βs} ds
  double c_prime_beta = 0.0;  ///< C′(β) = c ∫ e^{−βs} g(s)^p ds
  double ratio = 0.0;         ///< 2^{p−1}(C + C′), the bound on ‖K(X)−K(Y)‖^p / ‖X−Y‖^p
  double ratio_root = 0.0;    ///< ratio^{1/p}, the bound on the norm ratio
};

inline ContractionConstants contraction_constants(const MildProblem& pr, double beta, double c) {
  if (!(beta >= 0.0)) throw ConfigError("contraction_constants: beta must be >= 0");
  const double t = pr.horizon, p = pr.p;
  ContractionConstants out;
  out.beta = beta;
  const auto b = [&](double s) { return drift_bound(pr, s); };
  const double b_mass = integrate(b, 0.0, t);
  if (b_mass > 0.0)
    out.c_beta = std::pow(b_mass, p - 1.0) * integrate([&](double s) { return b(s) * std::exp(-beta * s); }, 0.0, t);
  if (c > 0.0)
    out.c_prime_beta =
        c * integrate([&](double s) { return std::exp(-beta * s) * std::pow(diffusion_bound(pr, s), p); }, 0.0, t);
  out.ratio = std::pow(2.0, p - 1.0) * (out.c_beta + out.c_prime_beta);
  out.ratio_root = std::pow(out.ratio, 1.0 / p);
  return out;
}

struct BetaSelection {
  std::optional<double> beta_min;  ///< smallest β with ratio < 1
  std::optional<double> beta;      ///< 2·β_min, the value used by the solver
  ContractionConstants at_beta;
  std::string message;
};

/// Finds the smallest β with 2^{p−1}(C(β)+C′(β)) < 1 by doubling and then
/// bisection, and returns it with a ×2 safety factor.
inline BetaSelection select_beta(const MildProblem& pr, double c, double beta_cap = 1e6) {
  BetaSelection sel;
  const auto ratio = [&](double beta) { return contraction_constants(pr, beta, c).ratio; };
  if (ratio(0.0) < 1.0) {
    sel.beta_min = 0.0;
  } else {
    double hi = 1.0;
    while (hi <= beta_cap && ratio(hi) >= 1.0) hi *= 2.0;
    if (hi > beta_cap) {
      sel.message = "no beta <= " + std::to_string(beta_cap) + " gives a contraction (ratio at cap " +
                    std::to_string(ratio(beta_cap)) + ")";
      sel.at_beta = contraction_constants(pr, beta_cap, c);
      return sel;
    }
    double lo = hi / 2.0 < 1.0 ? 0.0 : hi / 2.0;
    while (hi - lo > 1e-6 * hi) {
      const double mid = 0.5 * (lo + hi);
      (ratio(mid) < 1.0 ? hi : lo) = mid;
    }
    sel.beta_min = hi;
  }
  sel.beta = 2.0 * *sel.beta_min;
  sel.at_beta = contraction_constants(pr, *sel.beta, c);
  return sel;
}

}  // namespace cylevy::spde
