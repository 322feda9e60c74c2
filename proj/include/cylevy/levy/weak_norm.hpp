#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cylevy/levy/condition.hpp"
#include "cylevy/levy/moments.hpp"
#include "cylevy/levy/sampling.hpp"
#include "cylevy/mc/estimators.hpp"
#include "cylevy/mc/parallel.hpp"

namespace cylevy::levy {

/// Unit ball of the dual space E* over which functionals x* range.
/// The noise space E is ℓ² by default; ℓ¹ and ℓ^∞ domains pair with the
/// ℓ^∞ and ℓ¹ balls.
enum class DualBall { l2, linf, l1 };

/// Drift vector b with b_k = E[L(1)e_k].
inline Eigen::VectorXd drift_vector(const CylLevySpec& spec) {
  const auto k = static_cast<Eigen::Index>(spec.truncation());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  if (spec.is_diagonal()) {
    const auto& modes = spec.diagonal().modes;
    for (Eigen::Index i = 0; i < k; ++i) b[i] = mean_rate(modes[i]);
  }
  return b;
}

/// Covariance per unit time, Cov(L(1)).
inline Eigen::MatrixXd covariance_rate(const CylLevySpec& spec) {
  const auto k = static_cast<Eigen::Index>(spec.truncation());
  return std::visit(overloaded{
                        [&](const DiagonalCyl& d) -> Eigen::MatrixXd {
                          Eigen::VectorXd v(k);
                          for (Eigen::Index i = 0; i < k; ++i) v[i] = variance_rate(d.modes[i]);
                          return v.asDiagonal();
                        },
                        [&](const CompoundPoissonCyl& c) -> Eigen::MatrixXd {
                          const Eigen::Map<const Eigen::VectorXd> s(c.scales.data(), k);
                          const double z2 = jump_abs_moment(c.jumps, 2.0);
                          if (c.coupling == JumpCoupling::common) return c.rate * z2 * s * s.transpose();
                          return (c.rate * z2 * s.array().square()).matrix().asDiagonal();
                        },
                    },
                    spec.kind);
}

/// E[L(t) L(t)^T] = tΣ + t² b b^T.
inline Eigen::MatrixXd second_moment_matrix(const CylLevySpec& spec, double t) {
  const Eigen::VectorXd b = drift_vector(spec);
  return t * covariance_rate(spec) + t * t * b * b.transpose();
}

/// sup of x^T M x over the given ball, for symmetric positive semidefinite M.
inline double ball_quadratic_sup(const Eigen::MatrixXd& m, DualBall ball) {
  const Eigen::Index k = m.rows();
  switch (ball) {
    case DualBall::l2:
      return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    case DualBall::l1:
      return m.diagonal().maxCoeff();
    case DualBall::linf: {
      if (k > 24) throw ConfigError("ball_quadratic_sup: l-infinity ball limited to K <= 24");
      // Convex maximum over the cube sits at a vertex; fix s_0 = +1 by symmetry.
      double best = 0.0;
      Eigen::VectorXd s(k);
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (k - 1)); ++mask) {
        s[0] = 1.0;
        for (Eigen::Index i = 1; i < k; ++i) s[i] = (mask >> (i - 1)) & 1 ? -1.0 : 1.0;
        best = std::max(best, s.dot(m * s));
      }
      return best;
    }
  }
  return 0.0;
}

/// Throws AssumptionError naming the first mode whose p-th absolute moment is infinite.
inline void require_finite_moments(const CylLevySpec& spec, double p) {
  if (!spec.is_diagonal()) return;
  const auto& modes = spec.diagonal().modes;
  for (std::size_t k = 0; k < modes.size(); ++k)
    if (!has_finite_abs_moment(modes[k], p))
      throw AssumptionError("infinite p-th moment in mode " + std::to_string(k) + " (" + family_name(modes[k]) + ")");
}

/// K × n matrix whose column i is an increment over dt drawn from stream
/// (seed, stream_offset + i).
inline Eigen::MatrixXd sample_increment_matrix(const CylLevySpec& spec, double dt, const mc::McConfig& mc,
                                               std::uint64_t stream_offset = 0) {
  const auto cols = mc::parallel_map(mc.n_paths, mc.workers, [&](std::size_t i) {
    mc::RngStream rng(mc.seed, stream_offset + i);
    return cyl_increment(spec, dt, rng);
  });
  Eigen::MatrixXd y(static_cast<Eigen::Index>(spec.truncation()), static_cast<Eigen::Index>(mc.n_paths));
  for (std::size_t i = 0; i < cols.size(); ++i) y.col(static_cast<Eigen::Index>(i)) = cols[i];
  return y;
}

struct DirectionalMax {
  Eigen::VectorXd maximizer;
  mc::MomentEstimate moment;  ///< E|<x, Y>|^p at the maximizer
};

/// sup over the ball of the empirical E|<x, Y>|^p for sample columns Y.
///
/// The objective is convex and p-homogeneous, so its maximum over a ball sits
/// on an extreme point. The ℓ¹ ball is handled by enumerating ±e_k, small
/// ℓ^∞ balls by enumerating sign vectors. Otherwise the search starts from
/// quasi-uniform directions and refines the best ones by the ascent step
/// x ← argmax_{ball} <∇f(x), ·>, which never decreases a convex objective.
inline DirectionalMax directional_moment_max(const Eigen::MatrixXd& samples, double p, DualBall ball,
                                             std::uint64_t direction_seed, int n_random_directions = 32,
                                             double rel_tol = 1e-3) {
  const Eigen::Index k = samples.rows();
  const double n = static_cast<double>(samples.cols());
  const auto objective = [&](const Eigen::VectorXd& x) {
    return (samples.transpose() * x).array().abs().pow(p).sum() / n;
  };
  const auto gradient = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::ArrayXd proj = samples.transpose() * x;
    const Eigen::VectorXd w = (proj.abs().pow(p - 1.0) * proj.sign()).matrix();
    return samples * w * (p / n);
  };
  const auto project_extreme = [&](const Eigen::VectorXd& g) -> Eigen::VectorXd {
    if (ball == DualBall::linf) {
      Eigen::VectorXd s = g.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
      return s;
    }
    const double nrm = g.norm();
    if (nrm == 0.0) return Eigen::VectorXd::Unit(k, 0);
    return g / nrm;
  };

  Eigen::VectorXd best_x = Eigen::VectorXd::Unit(k, 0);
  double best_val = -1.0;
  const auto consider = [&](const Eigen::VectorXd& x) {
    const double v = objective(x);
    if (v > best_val) {
      best_val = v;
      best_x = x;
    }
    return v;
  };

  if (ball == DualBall::l1) {
    for (Eigen::Index i = 0; i < k; ++i) consider(Eigen::VectorXd::Unit(k, i));
  } else if (ball == DualBall::linf && k <= 12) {
    Eigen::VectorXd s(k);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (k - 1)); ++mask) {
      s[0] = 1.0;
      for (Eigen::Index i = 1; i < k; ++i) s[i] = (mask >> (i - 1)) & 1 ? -1.0 : 1.0;
      consider(s);
    }
  } else {
    std::vector<Eigen::VectorXd> starts;
    for (Eigen::Index i = 0; i < k; ++i) starts.push_back(project_extreme(Eigen::VectorXd::Unit(k, i)));
    starts.push_back(project_extreme(Eigen::VectorXd::Ones(k)));
    mc::RngStream rng(direction_seed, 0x5eed);
    for (int r = 0; r < n_random_directions; ++r) {
      Eigen::VectorXd g(k);
      for (Eigen::Index i = 0; i < k; ++i) g[i] = detail::standard_normal(rng);
      starts.push_back(project_extreme(g));
    }
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < starts.size(); ++i) ranked.emplace_back(consider(starts[i]), i);
    std::sort(ranked.begin(), ranked.end(), [](auto& a, auto& b) { return a.first > b.first; });
    const std::size_t n_refine = std::min<std::size_t>(4, ranked.size());
    for (std::size_t r = 0; r < n_refine; ++r) {
      Eigen::VectorXd x = starts[ranked[r].second];
      double val = ranked[r].first;
      for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd next = project_extreme(gradient(x));
        const double next_val = objective(next);
        if (!(next_val > val)) break;
        const bool converged = next_val - val <= rel_tol * 1e-3 * next_val;
        x = std::move(next);
        val = next_val;
        if (converged) break;
      }
      consider(x);
    }
  }

  mc::MomentAccumulator acc;
  const Eigen::ArrayXd proj = samples.transpose() * best_x;
  for (Eigen::Index i = 0; i < proj.size(); ++i) acc.add(std::pow(std::abs(proj[i]), p));
  return {best_x, mc::to_estimate(acc, p)};
}

enum class WeakNormEstimator { closed_form_p2, mc_sphere_search };

struct WeakNormConfig {
  WeakNormEstimator estimator = WeakNormEstimator::mc_sphere_search;
  mc::McConfig mc{};
  DualBall ball = DualBall::l2;
  int n_random_directions = 32;
  double rel_tol = 1e-3;
  std::uint64_t stream_offset = 0;
};

struct WeakNormEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  Eigen::VectorXd maximizer;
  bool closed_form = false;
};

/// ‖L(t)‖_p^* = sup_{x* in the dual ball} (E|L(t)x*|^p)^{1/p}.
inline WeakNormEstimate weak_p_norm(const CylLevySpec& spec, double t, double p, const WeakNormConfig& cfg = {}) {
  if (!(t > 0.0)) throw ConfigError("weak_p_norm: t must be positive");
  if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("weak_p_norm: p must lie in [1, 2]");
  validate(spec);
  require_finite_moments(spec, p);
  if (cfg.estimator == WeakNormEstimator::closed_form_p2) {
    if (p != 2.0) throw ConfigError("weak_p_norm: closed form only available for p = 2");
    WeakNormEstimate r;
    r.value = std::sqrt(ball_quadratic_sup(second_moment_matrix(spec, t), cfg.ball));
    r.closed_form = true;
    return r;
  }
  const Eigen::MatrixXd y = sample_increment_matrix(spec, t, cfg.mc, cfg.stream_offset);
  const DirectionalMax dm =
      directional_moment_max(y, p, cfg.ball, cfg.mc.seed ^ 0xd1f5ULL, cfg.n_random_directions, cfg.rel_tol);
  const mc::MomentEstimate root = dm.moment.root();
  return {root.value, root.standard_error, dm.maximizer, false};
}

/// Per-t row of an R_p norm estimate.
struct RpRow {
  double t = 0.0;
  mc::MomentEstimate moment;  ///< E|M(t)|^p
  double scaled = 0.0;        ///< t^{-1/p} (E|M(t)|^p)^{1/p}
};

struct RpNormEstimate {
  double norm = 0.0;            ///< max_t t^{-1/p}(E|M(t)|^p)^{1/p}
  double standard_error = 0.0;  ///< SE at the maximizing t
  double norm_pow_p = 0.0;      ///< max_t E|M(t)|^p / t
  /// Smallest c with E|M(t)|^p <= c·t·∫|β|^p ρ(dβ) on the grid (empirical).
  double constant_c = 0.0;
  std::vector<RpRow> rows;
};

/// R_p norm of the martingale part of a centered one-dimensional process.
inline RpNormEstimate rp_norm_estimate(const OneDimLevySpec& spec, double p, const std::vector<double>& t_grid,
                                       const mc::McConfig& mc) {
  validate(spec);
  if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("rp_norm_estimate: p must lie in [1, 2]");
  if (t_grid.empty()) throw ConfigError("rp_norm_estimate: empty time grid");
  if (mean_rate(spec) != 0.0) throw ConfigError("rp_norm_estimate: process must be centered");
  if (!has_finite_abs_moment(spec, p)) throw AssumptionError("rp_norm_estimate: infinite p-th moment");
  const double levy_moment = levy_p_moment(spec, p).value;

  RpNormEstimate out;
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    const double t = t_grid[ti];
    if (!(t > 0.0)) throw ConfigError("rp_norm_estimate: grid times must be positive");
    const auto vals = mc::parallel_map(mc.n_paths, mc.workers, [&](std::size_t i) {
      mc::RngStream rng(mc.seed, ti * mc.n_paths + i);
      return std::pow(std::abs(sample_increment(spec, t, rng)), p);
    });
    mc::MomentAccumulator acc;
    for (double v : vals) acc.add(v);
    RpRow row{t, mc::to_estimate(acc, p), 0.0};
    row.scaled = std::pow(row.moment.value / t, 1.0 / p);
    if (row.scaled > out.norm || out.rows.empty()) {
      out.norm = row.scaled;
      out.standard_error = row.moment.value > 0.0 ? row.scaled * row.moment.standard_error / (p * row.moment.value) : 0.0;
    }
    out.norm_pow_p = std::max(out.norm_pow_p, row.moment.value / t);
    if (levy_moment > 0.0)
      out.constant_c = std::max(out.constant_c, row.moment.value / (t * levy_moment));
    else if (row.moment.value > 0.0)
      out.constant_c = kInfinity;
    out.rows.push_back(row);
  }
  return out;
}

/// ‖M‖_{L(E*,R_p)} = sup_t t^{-1/p} ‖M(t)‖_p^* for a centered cylindrical process.
inline WeakNormEstimate rp_norm_cyl(const CylLevySpec& centered, double p, const std::vector<double>& t_grid,
                                    WeakNormConfig cfg) {
  if (drift_vector(centered).lpNorm<Eigen::Infinity>() != 0.0)
    throw ConfigError("rp_norm_cyl: process must be centered");
  if (p == 2.0 && cfg.estimator == WeakNormEstimator::closed_form_p2) {
    // E|M(t)x|^2 = t x^T Σ x, so the supremum does not depend on t.
    WeakNormEstimate r;
    r.value = std::sqrt(ball_quadratic_sup(covariance_rate(centered), cfg.ball));
    r.closed_form = true;
    return r;
  }
  WeakNormEstimate best;
  const std::uint64_t base = cfg.stream_offset;
  for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
    cfg.stream_offset = base + ti * cfg.mc.n_paths;
    WeakNormEstimate w = weak_p_norm(centered, t_grid[ti], p, cfg);
    const double scale = std::pow(t_grid[ti], -1.0 / p);
    w.value *= scale;
    w.standard_error *= scale;
    if (ti == 0 || w.value > best.value) best = w;
  }
  return best;
}

}  // namespace cylevy::levy
