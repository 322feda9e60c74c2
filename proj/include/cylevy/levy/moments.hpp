#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "cylevy/levy/spec.hpp"

namespace cylevy::levy {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// E|g|^p for a standard normal g: 2^{p/2} Γ((p+1)/2) / √π.
inline double gaussian_abs_moment(double p) {
  return std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
}

/// E|ζ|^p for a single jump ζ.
inline double jump_abs_moment(const JumpLaw& law, double p) {
  return std::visit(overloaded{
                        [&](const TwoPoint& j) { return std::pow(j.a, p); },
                        [&](const GaussianJump& j) { return std::pow(j.sigma, p) * gaussian_abs_moment(p); },
                        [&](const SymmetricExponentialJump& j) {
                          return std::tgamma(p + 1.0) / std::pow(j.theta, p);
                        },
                    },
                    law);
}

/// ∫|β|^p ρ(dβ) for the Lévy measure ρ, with the small/large jump split
/// reported separately for the stable family.
struct PMoment {
  double value = 0.0;
  bool small_jump_divergent = false;  ///< ∫_{|β|≤1}|β|^p ρ(dβ) = ∞
  bool large_jump_divergent = false;  ///< ∫_{|β|>1}|β|^p ρ(dβ) = ∞

  bool finite() const { return std::isfinite(value); }
};

inline PMoment levy_p_moment(const OneDimLevySpec& spec, double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("levy_p_moment: p must lie in [1, 2]");
  return std::visit(overloaded{
                        [](const BrownianMotion&) { return PMoment{}; },
                        [&](const CompoundPoisson& s) { return PMoment{s.rate * jump_abs_moment(s.jumps, p)}; },
                        [&](const DriftedCompoundPoisson& s) {
                          return PMoment{s.rate * jump_abs_moment(s.jumps, p)};
                        },
                        [&](const SymmetricAlphaStable& s) {
                          // ρ(dβ) ∝ |β|^{-1-α}dβ: the integral near 0 needs p > α,
                          // the one near infinity needs p < α.
                          return PMoment{kInfinity, p <= s.alpha, p >= s.alpha};
                        },
                    },
                    spec);
}

/// E[ℓ(1)]. Throws AssumptionError when the mean does not exist.
inline double mean_rate(const OneDimLevySpec& spec) {
  return std::visit(overloaded{
                        [](const BrownianMotion&) { return 0.0; },
                        [](const CompoundPoisson&) { return 0.0; },
                        [](const DriftedCompoundPoisson& s) { return s.drift; },
                        [](const SymmetricAlphaStable& s) {
                          if (s.alpha <= 1.0)
                            throw AssumptionError("stable mode with alpha <= 1 has no mean");
                          return 0.0;
                        },
                    },
                    spec);
}

/// Var(ℓ(1)); +∞ for stable modes.
inline double variance_rate(const OneDimLevySpec& spec) {
  return std::visit(overloaded{
                        [](const BrownianMotion& s) { return s.sigma * s.sigma; },
                        [](const CompoundPoisson& s) { return s.rate * jump_abs_moment(s.jumps, 2.0); },
                        [](const DriftedCompoundPoisson& s) { return s.rate * jump_abs_moment(s.jumps, 2.0); },
                        [](const SymmetricAlphaStable&) { return kInfinity; },
                    },
                    spec);
}

/// Is E|ℓ(t)|^p finite?
inline bool has_finite_abs_moment(const OneDimLevySpec& spec, double p) {
  if (const auto* s = std::get_if<SymmetricAlphaStable>(&spec)) return p < s->alpha;
  return true;
}

namespace detail {

inline double log_poisson_pmf(long n, double mean) {
  return static_cast<double>(n) * std::log(mean) - mean - std::lgamma(static_cast<double>(n) + 1.0);
}

/// Σ_n P(N = n) f(n) for N ~ Poisson(mean), truncated where the tail is negligible.
template <class F>
double poisson_mixture(double mean, F&& f) {
  if (mean <= 0.0) return f(0L);
  const long n_max = static_cast<long>(mean + 40.0 * std::sqrt(mean) + 60.0);
  double total = 0.0;
  for (long n = 0; n <= n_max; ++n) total += std::exp(log_poisson_pmf(n, mean)) * f(n);
  return total;
}

}  // namespace detail

/// Closed-form E|ℓ(t)|^p where one is available; nullopt otherwise.
inline std::optional<double> abs_moment_exact(const OneDimLevySpec& spec, double t, double p) {
  const auto compound = [&](double drift, double rate, const JumpLaw& jumps) -> std::optional<double> {
    const double mean = rate * t;
    if (mean <= 0.0) return std::pow(std::abs(drift * t), p);
    if (p == 2.0) return rate * t * jump_abs_moment(jumps, 2.0) + drift * drift * t * t;
    if (drift != 0.0) return std::nullopt;
    if (const auto* tp = std::get_if<TwoPoint>(&jumps)) {
      // a(2B - n) with B ~ Bin(n, 1/2)
      return detail::poisson_mixture(mean, [&](long n) {
        double s = 0.0;
        for (long j = 0; j <= n; ++j) {
          const double logc = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) -
                              static_cast<double>(n) * std::numbers::ln2;
          s += std::exp(logc) * std::pow(std::abs(static_cast<double>(2 * j - n)), p);
        }
        return std::pow(tp->a, p) * s;
      });
    }
    if (const auto* g = std::get_if<GaussianJump>(&jumps)) {
      return detail::poisson_mixture(mean, [&](long n) {
        return std::pow(g->sigma * g->sigma * static_cast<double>(n), p / 2.0) * gaussian_abs_moment(p);
      });
    }
    return std::nullopt;
  };
  return std::visit(
      overloaded{
          [&](const BrownianMotion& s) -> std::optional<double> {
            return std::pow(s.sigma * std::sqrt(t), p) * gaussian_abs_moment(p);
          },
          [&](const CompoundPoisson& s) { return compound(0.0, s.rate, s.jumps); },
          [&](const DriftedCompoundPoisson& s) { return compound(s.drift, s.rate, s.jumps); },
          [&](const SymmetricAlphaStable& s) -> std::optional<double> {
            if (p >= s.alpha) return kInfinity;
            // E|X|^p = 2^p Γ((1+p)/2) Γ(1-p/α) / (√π Γ(1-p/2)) for exp(-|u|^α)
            const double unit = std::pow(2.0, p) * std::tgamma((1.0 + p) / 2.0) * std::tgamma(1.0 - p / s.alpha) /
                                (std::sqrt(std::numbers::pi) * std::tgamma(1.0 - p / 2.0));
            return std::pow(s.scale * std::pow(t, 1.0 / s.alpha), p) * unit;
          },
      },
      spec);
}

}  // namespace cylevy::levy
