#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "cylevy/levy/sampling.hpp"
#include "cylevy/mc/rng.hpp"
#include "cylevy/psumming/pi_p.hpp"
#include "cylevy/spde/semigroup.hpp"

namespace cylevy::spde {

using BoundFunction = std::function<double(double)>;

enum class DriftKind { zero, sine_diag, linear_diag };

/// B(x)_k = c_k sin(x_k) or c_k x_k. `bound` overrides the default dominating
/// function b(t) = max_k |c_k| e^{−λ_k t}.
struct DriftCoefficient {
  DriftKind kind = DriftKind::zero;
  Eigen::VectorXd c;
  BoundFunction bound;
};

enum class DiffusionKind { zero, constant_diag, scalar_factor_diag };

/// Scalar factors h(‖x‖) for the scalar-factor kind.
enum class FactorFormula { one_plus_sin, sin };

/// G(x) = h(‖x‖)·diag(q) (h ≡ 1 for constant_diag). `bound` overrides the
/// default g(t) = sup|h|·π_p(S(t)diag(q)).
struct DiffusionCoefficient {
  DiffusionKind kind = DiffusionKind::zero;
  Eigen::VectorXd q;
  FactorFormula factor = FactorFormula::one_plus_sin;
  double factor_scale = 1.0;
  BoundFunction bound;
};

enum class InitialLaw { deterministic, gaussian, two_point };

/// X₀ = loc + scale ⊙ ξ with ξ_k = 0, N(0,1) or ±1.
struct InitialCondition {
  InitialLaw law = InitialLaw::deterministic;
  Eigen::VectorXd loc;
  Eigen::VectorXd scale;
};

/// dX = (AX + B(X))dt + G(X)dL on R^K, with L truncated to the same K modes.
struct MildProblem {
  SemigroupSpec semigroup;
  DriftCoefficient drift;
  DiffusionCoefficient diffusion;
  InitialCondition x0;
  levy::CylLevySpec noise;
  double horizon = 1.0;
  double p = 2.0;

  std::size_t dim() const { return semigroup.dim(); }
};

inline double factor_value(FactorFormula f, double r) {
  switch (f) {
    case FactorFormula::one_plus_sin: return 1.0 + std::sin(r);
    case FactorFormula::sin: return std::sin(r);
  }
  return 0.0;
}

inline double factor_sup(FactorFormula f) { return f == FactorFormula::one_plus_sin ? 2.0 : 1.0; }

inline std::string to_string(FactorFormula f) { return f == FactorFormula::one_plus_sin ? "one_plus_sin" : "sin"; }

inline void validate(const MildProblem& pr) {
  pr.semigroup.validate();
  levy::validate(pr.noise);
  const auto k = static_cast<Eigen::Index>(pr.dim());
  if (pr.noise.truncation() != pr.dim()) throw ConfigError("MildProblem: noise truncation must equal the state dimension");
  if (!(pr.horizon > 0.0)) throw ConfigError("MildProblem: horizon must be positive");
  if (!(pr.p >= 1.0 && pr.p <= 2.0)) throw ConfigError("MildProblem: p must lie in [1, 2]");
  if (pr.drift.kind != DriftKind::zero && pr.drift.c.size() != k) throw ConfigError("MildProblem: drift size mismatch");
  if (pr.diffusion.kind != DiffusionKind::zero && pr.diffusion.q.size() != k)
    throw ConfigError("MildProblem: diffusion size mismatch");
  if (pr.x0.loc.size() != k) throw ConfigError("MildProblem: X0 location size mismatch");
  if (pr.x0.law != InitialLaw::deterministic && pr.x0.scale.size() != k)
    throw ConfigError("MildProblem: X0 scale size mismatch");
}

inline Eigen::VectorXd drift_value(const MildProblem& pr, const Eigen::VectorXd& x) {
  switch (pr.drift.kind) {
    case DriftKind::zero: return Eigen::VectorXd::Zero(x.size());
    case DriftKind::sine_diag: return pr.drift.c.cwiseProduct(x.array().sin().matrix());
    case DriftKind::linear_diag: return pr.drift.c.cwiseProduct(x);
  }
  return Eigen::VectorXd::Zero(x.size());
}

/// Diagonal of G(x).
inline Eigen::VectorXd diffusion_diag(const MildProblem& pr, const Eigen::VectorXd& x) {
  const auto& d = pr.diffusion;
  switch (d.kind) {
    case DiffusionKind::zero: return Eigen::VectorXd::Zero(x.size());
    case DiffusionKind::constant_diag: return d.q;
    case DiffusionKind::scalar_factor_diag: return d.factor_scale * factor_value(d.factor, x.norm()) * d.q;
  }
  return Eigen::VectorXd::Zero(x.size());
}

/// Certified π_p upper bound of a diagonal operator on ℓ²: the
/// Hilbert–Schmidt norm at p = 2, the trace norm otherwise.
inline double diagonal_pi_p(const Eigen::VectorXd& d, double p) {
  return p == 2.0 ? d.norm() : d.lpNorm<1>();
}

inline double drift_bound(const MildProblem& pr, double t) {
  if (pr.drift.bound) return pr.drift.bound(t);
  if (pr.drift.kind == DriftKind::zero) return 0.0;
  return pr.drift.c.cwiseAbs().cwiseProduct(pr.semigroup.decay(t)).maxCoeff();
}

inline double diffusion_bound(const MildProblem& pr, double t) {
  const auto& d = pr.diffusion;
  if (d.bound) return d.bound(t);
  if (d.kind == DiffusionKind::zero) return 0.0;
  const double pi = diagonal_pi_p(pr.semigroup.decay(t).cwiseProduct(d.q), pr.p);
  if (d.kind == DiffusionKind::constant_diag) return pi;
  return std::abs(d.factor_scale) * factor_sup(d.factor) * pi;
}

inline Eigen::VectorXd sample_initial(const InitialCondition& x0, mc::RngStream& rng) {
  Eigen::VectorXd x = x0.loc;
  if (x0.law == InitialLaw::deterministic) return x;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double xi = x0.law == InitialLaw::gaussian ? levy::detail::standard_normal(rng)
                                                     : (rng.uniform_open() < 0.5 ? -1.0 : 1.0);
    x[k] += x0.scale[k] * xi;
  }
  return x;
}

/// E‖X₀‖^p, exact for the deterministic and two-point laws; Gaussian laws
/// are bounded through E‖X₀‖² (p ≤ 2).
inline double initial_moment_bound(const InitialCondition& x0, double p) {
  if (x0.law == InitialLaw::deterministic) return std::pow(x0.loc.norm(), p);
  const double second = x0.loc.squaredNorm() + x0.scale.squaredNorm();
  return std::pow(second, p / 2.0);
}

struct BoundCheckRow {
  std::string inequality;
  double max_ratio = 0.0;
  double worst_t = 0.0;
};

struct BoundCheckReport {
  std::vector<BoundCheckRow> rows;
  double max_ratio = 0.0;
};

inline constexpr double kBoundRatioTolerance = 1e-9;

/// Samples x, x₁, x₂ at several scales and checks, for every t in the grid,
///   ‖S(t)B(x)‖ ≤ b(t)(1+‖x‖),        ‖S(t)(B(x₁)−B(x₂))‖ ≤ b(t)‖x₁−x₂‖,
///   π_p(S(t)G(x)) ≤ g(t)(1+‖x‖),     π_p(S(t)(G(x₁)−G(x₂))) ≤ g(t)‖x₁−x₂‖.
/// Throws AssumptionError naming the first inequality whose worst ratio
/// exceeds 1 + 1e-9.
inline BoundCheckReport bound_functions_check(const MildProblem& pr, std::size_t n_samples,
                                              const std::vector<double>& t_grid, mc::RngStream rng) {
  validate(pr);
  const auto k = static_cast<Eigen::Index>(pr.dim());
  BoundCheckReport rep;
  rep.rows = {{"drift growth"}, {"drift lipschitz"}, {"diffusion growth"}, {"diffusion lipschitz"}};
  const auto ratio = [](double lhs, double rhs) {
    if (lhs <= 0.0) return 0.0;
    return rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
  };
  const auto record = [&](std::size_t i, double r, double t) {
    if (r > rep.rows[i].max_ratio) rep.rows[i] = {rep.rows[i].inequality, r, t};
  };
  const auto draw = [&] {
    const double scale = std::pow(10.0, -2.0 + 3.0 * rng.uniform_open());
    Eigen::VectorXd x(k);
    for (Eigen::Index i = 0; i < k; ++i) x[i] = scale * levy::detail::standard_normal(rng);
    return x;
  };
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Eigen::VectorXd x = draw(), x1 = draw();
    // Half the pairs are close together, which probes the Lipschitz bound.
    const Eigen::VectorXd x2 = (s % 2 == 0) ? draw() : Eigen::VectorXd(x1 + 1e-3 * draw());
    for (double t : t_grid) {
      const Eigen::VectorXd st = pr.semigroup.decay(t);
      const double b = drift_bound(pr, t), g = diffusion_bound(pr, t);
      const double dx = (x1 - x2).norm();
      record(0, ratio(st.cwiseProduct(drift_value(pr, x)).norm(), b * (1.0 + x.norm())), t);
      record(1, ratio(st.cwiseProduct(drift_value(pr, x1) - drift_value(pr, x2)).norm(), b * dx), t);
      record(2, ratio(diagonal_pi_p(st.cwiseProduct(diffusion_diag(pr, x)), pr.p), g * (1.0 + x.norm())), t);
      record(3, ratio(diagonal_pi_p(st.cwiseProduct(diffusion_diag(pr, x1) - diffusion_diag(pr, x2)), pr.p), g * dx),
             t);
    }
  }
  for (const auto& row : rep.rows) {
    rep.max_ratio = std::max(rep.max_ratio, row.max_ratio);
    if (row.max_ratio > 1.0 + kBoundRatioTolerance)
      throw AssumptionError("bound_functions_check: " + row.inequality + " violated (ratio " +
                            std::to_string(row.max_ratio) + " at t = " + std::to_string(row.worst_t) + ")");
  }
  return rep;
}

}  // namespace cylevy::spde
