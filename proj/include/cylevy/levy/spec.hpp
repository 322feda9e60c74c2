#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "cylevy/errors.hpp"

namespace cylevy::levy {

// Jump laws. All are symmetric about zero.

/// ±a, each with probability 1/2.
struct TwoPoint {
  double a = 1.0;
};

/// N(0, sigma²).
struct GaussianJump {
  double sigma = 1.0;
};

/// Laplace law with density (theta/2)·exp(-theta|x|); theta is a rate.
struct SymmetricExponentialJump {
  double theta = 1.0;
};

using JumpLaw = std::variant<TwoPoint, GaussianJump, SymmetricExponentialJump>;

// One-dimensional Lévy processes.

struct BrownianMotion {
  double sigma = 1.0;
};

/// Jumps at the times of a Poisson process of the given rate.
struct CompoundPoisson {
  double rate = 1.0;
  JumpLaw jumps = TwoPoint{};
};

/// Symmetric α-stable with characteristic function exp(-t|scale·u|^α).
struct SymmetricAlphaStable {
  double alpha = 1.5;
  double scale = 1.0;
};

/// drift·t plus an independent compound Poisson process.
struct DriftedCompoundPoisson {
  double drift = 0.0;
  double rate = 1.0;
  JumpLaw jumps = TwoPoint{};
};

using OneDimLevySpec =
    std::variant<BrownianMotion, CompoundPoisson, SymmetricAlphaStable, DriftedCompoundPoisson>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline void validate(const JumpLaw& law) {
  std::visit(overloaded{
                 [](const TwoPoint& j) {
                   if (!(j.a > 0.0) || !std::isfinite(j.a)) throw ConfigError("TwoPoint: a must be > 0");
                 },
                 [](const GaussianJump& j) {
                   if (!(j.sigma > 0.0) || !std::isfinite(j.sigma))
                     throw ConfigError("GaussianJump: sigma must be > 0");
                 },
                 [](const SymmetricExponentialJump& j) {
                   if (!(j.theta > 0.0) || !std::isfinite(j.theta))
                     throw ConfigError("SymmetricExponentialJump: theta must be > 0");
                 },
             },
             law);
}

// Rate zero is accepted for the compound Poisson families: it is the
// jump-free (deterministic drift) limit used by several degenerate checks.
inline void validate(const OneDimLevySpec& spec) {
  std::visit(overloaded{
                 [](const BrownianMotion& s) {
                   if (!(s.sigma > 0.0) || !std::isfinite(s.sigma))
                     throw ConfigError("BrownianMotion: sigma must be > 0");
                 },
                 [](const CompoundPoisson& s) {
                   if (!(s.rate >= 0.0) || !std::isfinite(s.rate))
                     throw ConfigError("CompoundPoisson: rate must be >= 0");
                   validate(s.jumps);
                 },
                 [](const SymmetricAlphaStable& s) {
                   if (!(s.alpha > 0.0 && s.alpha < 2.0))
                     throw ConfigError("SymmetricAlphaStable: alpha must lie in (0, 2)");
                   if (!(s.scale > 0.0) || !std::isfinite(s.scale))
                     throw ConfigError("SymmetricAlphaStable: scale must be > 0");
                 },
                 [](const DriftedCompoundPoisson& s) {
                   if (!std::isfinite(s.drift)) throw ConfigError("DriftedCompoundPoisson: drift must be finite");
                   if (!(s.rate >= 0.0) || !std::isfinite(s.rate))
                     throw ConfigError("DriftedCompoundPoisson: rate must be >= 0");
                   validate(s.jumps);
                 },
             },
             spec);
}

inline std::string family_name(const OneDimLevySpec& spec) {
  return std::visit(overloaded{
                        [](const BrownianMotion&) { return std::string("brownian"); },
                        [](const CompoundPoisson&) { return std::string("compound_poisson"); },
                        [](const SymmetricAlphaStable&) { return std::string("stable"); },
                        [](const DriftedCompoundPoisson&) { return std::string("drifted_compound_poisson"); },
                    },
                    spec);
}

// Cylindrical processes at truncation level K.

/// L(t)x = Σ_k x_k ℓ_k(t) with independent one-dimensional modes.
struct DiagonalCyl {
  std::vector<OneDimLevySpec> modes;
};

/// How the coordinates of one jump vector are tied together.
enum class JumpCoupling {
  independent,  ///< Y_k = scale_k·ζ_k with i.i.d. ζ_k
  common,       ///< Y_k = scale_k·ζ with a single shared ζ
};

/// L(t) = Σ_{i ≤ N(t)} Y_i with N Poisson of the given rate.
struct CompoundPoissonCyl {
  double rate = 1.0;
  std::vector<double> scales;
  JumpLaw jumps = TwoPoint{};
  JumpCoupling coupling = JumpCoupling::independent;
};

struct CylLevySpec {
  std::variant<DiagonalCyl, CompoundPoissonCyl> kind;

  std::size_t truncation() const {
    return std::visit(overloaded{
                          [](const DiagonalCyl& d) { return d.modes.size(); },
                          [](const CompoundPoissonCyl& c) { return c.scales.size(); },
                      },
                      kind);
  }
  bool is_diagonal() const { return std::holds_alternative<DiagonalCyl>(kind); }
  const DiagonalCyl& diagonal() const { return std::get<DiagonalCyl>(kind); }
};

inline void validate(const CylLevySpec& spec) {
  if (spec.truncation() == 0) throw ConfigError("cylindrical spec: truncation K must be >= 1");
  std::visit(overloaded{
                 [](const DiagonalCyl& d) {
                   for (const auto& m : d.modes) validate(m);
                 },
                 [](const CompoundPoissonCyl& c) {
                   if (!(c.rate >= 0.0) || !std::isfinite(c.rate))
                     throw ConfigError("CompoundPoissonCyl: rate must be >= 0");
                   for (double s : c.scales)
                     if (!std::isfinite(s)) throw ConfigError("CompoundPoissonCyl: scales must be finite");
                   validate(c.jumps);
                 },
             },
             spec.kind);
}

inline CylLevySpec make_diagonal(std::vector<OneDimLevySpec> modes) {
  CylLevySpec spec{DiagonalCyl{std::move(modes)}};
  validate(spec);
  return spec;
}

}  // namespace cylevy::levy
