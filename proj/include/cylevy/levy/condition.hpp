#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cylevy/levy/moments.hpp"

namespace cylevy::levy {

/// Verdict on the weak p-integrability condition ∫|x*(x)|^p ν(dx) < ∞.
///
/// For a diagonal process this is Σ_k m_k^{2/(2-p)} < ∞ with
/// m_k = ∫|β|^p ρ_k(dβ). At a finite truncation every finite sum converges,
/// so the verdict also needs the decay of the tail: the decreasing
/// rearrangement of (m_k) is fitted as C·j^{-δ} over its second half and the
/// full series converges iff δ·2/(2-p) > 1.
struct ConditionReport {
  double p = 1.0;
  std::vector<double> moments;  ///< m_k, +∞ where divergent
  double aggregate = 0.0;       ///< ℓ^{2/(2-p)} norm of (m_k); sup norm at p = 2
  bool sup_criterion = false;   ///< p = 2: sup_k m_k < ∞ is used
  bool tail_estimated = false;
  double tail_decay = 0.0;       ///< δ in m_(j) ≈ C j^{-δ}
  double series_exponent = 0.0;  ///< δ·2/(2-p); +∞ for finitely supported tails
  bool pass = false;
  std::optional<std::size_t> failing_index;  ///< first mode with m_k = ∞
  std::string reason;
};

inline constexpr std::size_t kMinModesForTailFit = 8;

namespace detail {

/// Fit log m_(j) = c - δ log j over ranks ceil(K/2)..K of the decreasing
/// rearrangement. Returns nullopt if fewer than three positive tail values.
inline std::optional<double> fit_tail_decay(std::vector<double> m) {
  std::sort(m.begin(), m.end(), std::greater<>());
  const std::size_t k = m.size();
  const std::size_t first = (k + 1) / 2;  // 1-based rank ceil(K/2) -> index first-1
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t idx = first - 1; idx < k; ++idx) {
    if (!(m[idx] > 0.0)) continue;
    const double x = std::log(static_cast<double>(idx + 1));
    const double y = std::log(m[idx]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 3) return std::nullopt;
  const double n = static_cast<double>(count);
  const double slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
  return -slope;
}

}  // namespace detail

inline ConditionReport check_weak_p_condition(const CylLevySpec& spec, double p) {
  if (!spec.is_diagonal()) throw ConfigError("check_weak_p_condition: diagonal spec required");
  if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("check_weak_p_condition: p must lie in [1, 2]");
  validate(spec);
  const auto& modes = spec.diagonal().modes;

  ConditionReport r;
  r.p = p;
  r.sup_criterion = (p == 2.0);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const PMoment pm = levy_p_moment(modes[k], p);
    r.moments.push_back(pm.value);
    if (!pm.finite() && !r.failing_index) r.failing_index = k;
  }
  if (r.failing_index) {
    r.aggregate = kInfinity;
    r.pass = false;
    r.reason = "infinite p-th moment of the Levy measure in mode " + std::to_string(*r.failing_index);
    return r;
  }

  if (r.sup_criterion) {
    r.aggregate = *std::max_element(r.moments.begin(), r.moments.end());
  } else {
    const double q = 2.0 / (2.0 - p);
    double s = 0.0;
    for (double m : r.moments) s += std::pow(m, q);
    r.aggregate = std::pow(s, 1.0 / q);
  }

  if (modes.size() >= kMinModesForTailFit) {
    r.tail_estimated = true;
    const auto decay = detail::fit_tail_decay(r.moments);
    if (!decay) {
      r.tail_decay = kInfinity;
      r.series_exponent = kInfinity;
    } else {
      r.tail_decay = *decay;
      r.series_exponent = r.sup_criterion ? kInfinity : *decay * 2.0 / (2.0 - p);
    }
  }

  if (r.sup_criterion) {
    // A decreasing rearrangement is bounded by its first term.
    r.pass = true;
    r.reason = "p = 2: sup_k m_k finite";
  } else if (!r.tail_estimated) {
    r.pass = true;
    r.reason = "all moments finite; too few modes for a tail estimate";
  } else {
    r.pass = r.series_exponent > 1.0;
    r.reason = r.pass ? "tail series exponent > 1" : "tail series exponent <= 1: series diverges";
  }
  return r;
}

/// Condition check for any supported cylindrical process. For the compound
/// Poisson kind the condition reduces to finiteness of the jump moments.
inline ConditionReport check_condition(const CylLevySpec& spec, double p) {
  if (spec.is_diagonal()) return check_weak_p_condition(spec, p);
  if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("check_condition: p must lie in [1, 2]");
  validate(spec);
  const auto& c = std::get<CompoundPoissonCyl>(spec.kind);
  ConditionReport r;
  r.p = p;
  for (double s : c.scales) r.moments.push_back(c.rate * std::pow(std::abs(s), p) * jump_abs_moment(c.jumps, p));
  r.aggregate = *std::max_element(r.moments.begin(), r.moments.end());
  r.pass = true;
  r.reason = "compound Poisson: jump law has finite p-th moments";
  return r;
}

}  // namespace cylevy::levy
