#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cylevy/levy/spec.hpp"
#include "cylevy/mc/rng.hpp"

namespace cylevy::levy {

namespace detail {

inline double standard_normal(mc::RngStream& rng) {
  return std::normal_distribution<double>{}(rng);
}

inline long poisson_count(double mean, mc::RngStream& rng) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<long>{mean}(rng);
}

inline double single_jump(const JumpLaw& law, mc::RngStream& rng) {
  return std::visit(overloaded{
                        [&](const TwoPoint& j) { return (rng() >> 63) ? j.a : -j.a; },
                        [&](const GaussianJump& j) { return j.sigma * standard_normal(rng); },
                        [&](const SymmetricExponentialJump& j) {
                          const double e = -std::log(rng.uniform_open()) / j.theta;
                          return (rng() >> 63) ? e : -e;
                        },
                    },
                    law);
}

/// Sum of n i.i.d. jumps, drawn in O(1) for each law.
inline double jump_sum(const JumpLaw& law, long n, mc::RngStream& rng) {
  if (n == 0) return 0.0;
  return std::visit(
      overloaded{
          [&](const TwoPoint& j) {
            const long ups = std::binomial_distribution<long>{n, 0.5}(rng);
            return j.a * static_cast<double>(2 * ups - n);
          },
          [&](const GaussianJump& j) {
            return j.sigma * std::sqrt(static_cast<double>(n)) * standard_normal(rng);
          },
          [&](const SymmetricExponentialJump& j) {
            // A Laplace variable is a difference of two exponentials.
            std::gamma_distribution<double> gamma(static_cast<double>(n), 1.0 / j.theta);
            const double plus = gamma(rng);
            return plus - gamma(rng);
          },
      },
      law);
}

/// Chambers–Mallows–Stuck draw with characteristic function exp(-|u|^α).
inline double standard_symmetric_stable(double alpha, mc::RngStream& rng) {
  const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
  const double w = -std::log(rng.uniform_open());
  if (alpha == 1.0) return std::tan(v);
  return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
         std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

}  // namespace detail

/// One draw of the increment ℓ(t+dt) − ℓ(t), exact in law.
inline double sample_increment(const OneDimLevySpec& spec, double dt, mc::RngStream& rng) {
  if (!(dt > 0.0)) throw ConfigError("sample_increment: dt must be positive");
  return std::visit(
      overloaded{
          [&](const BrownianMotion& s) { return s.sigma * std::sqrt(dt) * detail::standard_normal(rng); },
          [&](const CompoundPoisson& s) {
            return detail::jump_sum(s.jumps, detail::poisson_count(s.rate * dt, rng), rng);
          },
          [&](const SymmetricAlphaStable& s) {
            return s.scale * std::pow(dt, 1.0 / s.alpha) * detail::standard_symmetric_stable(s.alpha, rng);
          },
          [&](const DriftedCompoundPoisson& s) {
            return s.drift * dt + detail::jump_sum(s.jumps, detail::poisson_count(s.rate * dt, rng), rng);
          },
      },
      spec);
}

inline std::vector<double> sample_increments(const OneDimLevySpec& spec, double dt, std::size_t n,
                                             mc::RngStream& rng) {
  validate(spec);
  std::vector<double> out(n);
  for (auto& x : out) x = sample_increment(spec, dt, rng);
  return out;
}

/// Increment of the cylindrical process over a step dt, as a vector in R^K.
inline Eigen::VectorXd cyl_increment(const CylLevySpec& spec, double dt, mc::RngStream& rng) {
  if (!(dt > 0.0)) throw ConfigError("cyl_increment: dt must be positive");
  const auto k = static_cast<Eigen::Index>(spec.truncation());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(k);
  std::visit(overloaded{
                 [&](const DiagonalCyl& d) {
                   for (Eigen::Index i = 0; i < k; ++i) out[i] = sample_increment(d.modes[i], dt, rng);
                 },
                 [&](const CompoundPoissonCyl& c) {
                   const long n = detail::poisson_count(c.rate * dt, rng);
                   if (n == 0) return;
                   if (c.coupling == JumpCoupling::common) {
                     // Σ_i scale·ζ_i = scale·(Σ_i ζ_i)
                     const double s = detail::jump_sum(c.jumps, n, rng);
                     for (Eigen::Index i = 0; i < k; ++i) out[i] = c.scales[i] * s;
                   } else {
                     for (Eigen::Index i = 0; i < k; ++i)
                       out[i] = c.scales[i] * detail::jump_sum(c.jumps, n, rng);
                   }
                 },
             },
             spec.kind);
  return out;
}

}  // namespace cylevy::levy
