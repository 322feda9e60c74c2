#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "cylevy/mc/estimators.hpp"
#include "cylevy/mc/parallel.hpp"
#include "cylevy/psumming/decay.hpp"
#include "cylevy/spde/constants.hpp"

namespace cylevy::spde {

using Grid = std::vector<double>;
/// One trajectory: column i is X(t_i).
using Path = Eigen::MatrixXd;

inline Grid uniform_grid(double horizon, std::size_t steps) {
  if (steps == 0 || !(horizon > 0.0)) throw ConfigError("uniform_grid: need steps >= 1 and horizon > 0");
  Grid g(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) g[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
  g.back() = horizon;
  return g;
}

inline void validate_grid(const Grid& grid, double horizon) {
  if (grid.size() < 2 || grid.front() != 0.0) throw ConfigError("grid must start at 0 with at least two points");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i + 1] > grid[i])) throw ConfigError("grid must be strictly increasing");
  if (std::abs(grid.back() - horizon) > 1e-12 * horizon) throw ConfigError("grid must end at the horizon");
}

inline void require_path_shape(const Path& x, const Grid& grid, std::size_t dim, const char* who) {
  if (static_cast<std::size_t>(x.cols()) != grid.size() || static_cast<std::size_t>(x.rows()) != dim)
    throw ConfigError(std::string(who) + ": path does not match the grid");
}

/// X₀ and the increments ΔL_j = L(t_{j+1}) − L(t_j) of one path. Drawn in
/// that order from the path's stream, so every solver sees the same noise.
struct PathNoise {
  Eigen::VectorXd x0;
  Eigen::MatrixXd increments;  ///< K × N
};

inline PathNoise draw_path_noise(const MildProblem& pr, const Grid& grid, mc::RngStream& rng) {
  PathNoise n;
  n.x0 = sample_initial(pr.x0, rng);
  n.increments.resize(static_cast<Eigen::Index>(pr.dim()), static_cast<Eigen::Index>(grid.size() - 1));
  for (std::size_t j = 0; j + 1 < grid.size(); ++j)
    n.increments.col(static_cast<Eigen::Index>(j)) = levy::cyl_increment(pr.noise, grid[j + 1] - grid[j], rng);
  return n;
}

namespace detail {

/// Y(t_i) = Σ_{j<i} S(t_i − t_j) v_j, using S(t_{i+1} − t_j) = S(Δ_i)S(t_i − t_j).
template <class Term>
Path convolve(const MildProblem& pr, const Grid& grid, const Eigen::VectorXd& start, Term&& term) {
  Path y(static_cast<Eigen::Index>(pr.dim()), static_cast<Eigen::Index>(grid.size()));
  y.col(0) = start;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    y.col(c + 1) = pr.semigroup.decay(grid[i + 1] - grid[i]).cwiseProduct(y.col(c) + term(i));
  }
  return y;
}

}  // namespace detail

/// K₁(X)(t_i) = Σ_{j<i} S(t_i − t_j) B(X(t_j)) Δ_j.
inline Path drift_convolution(const MildProblem& pr, const Path& x, const Grid& grid) {
  require_path_shape(x, grid, pr.dim(), "drift_convolution");
  return detail::convolve(pr, grid, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pr.dim())), [&](std::size_t j) {
    return Eigen::VectorXd(drift_value(pr, x.col(static_cast<Eigen::Index>(j))) * (grid[j + 1] - grid[j]));
  });
}

/// K₂(X)(t_i) = Σ_{j<i} S(t_i − t_j) G(X(t_j)) ΔL_j with one set of increments
/// shared by all t_i.
inline Path stochastic_convolution(const MildProblem& pr, const Path& x, const Grid& grid,
                                   const Eigen::MatrixXd& increments) {
  require_path_shape(x, grid, pr.dim(), "stochastic_convolution");
  if (increments.cols() + 1 != static_cast<Eigen::Index>(grid.size()) || increments.rows() != x.rows())
    throw ConfigError("stochastic_convolution: increments do not match the grid");
  return detail::convolve(pr, grid, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pr.dim())), [&](std::size_t j) {
    const auto c = static_cast<Eigen::Index>(j);
    return Eigen::VectorXd(diffusion_diag(pr, x.col(c)).cwiseProduct(increments.col(c)));
  });
}

/// K(X) = S(·)X₀ + K₁(X) + K₂(X), evaluated in one sweep.
inline Path picard_map(const MildProblem& pr, const Path& x, const Grid& grid, const PathNoise& noise) {
  require_path_shape(x, grid, pr.dim(), "picard_map");
  return detail::convolve(pr, grid, noise.x0, [&](std::size_t j) {
    const auto c = static_cast<Eigen::Index>(j);
    const Eigen::VectorXd xj = x.col(c);
    return Eigen::VectorXd(drift_value(pr, xj) * (grid[j + 1] - grid[j]) +
                           diffusion_diag(pr, xj).cwiseProduct(noise.increments.col(c)));
  });
}

/// Per-time E‖A(t) − B(t)‖^p (B may be null).
inline std::vector<mc::MomentEstimate> time_moments(const std::vector<Path>& a, const std::vector<Path>* b, double p) {
  if (a.empty()) throw ConfigError("time_moments: empty ensemble");
  if (b && b->size() != a.size()) throw ConfigError("time_moments: ensembles differ in size");
  const Eigen::Index n_t = a.front().cols();
  std::vector<mc::MomentAccumulator> acc(static_cast<std::size_t>(n_t));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].cols() != n_t || (b && ((*b)[i].cols() != n_t || (*b)[i].rows() != a[i].rows())))
      throw ConfigError("time_moments: grid mismatch");
    for (Eigen::Index t = 0; t < n_t; ++t) {
      const double v = b ? (a[i].col(t) - (*b)[i].col(t)).norm() : a[i].col(t).norm();
      acc[static_cast<std::size_t>(t)].add(std::pow(v, p));
    }
  }
  std::vector<mc::MomentEstimate> out;
  for (const auto& x : acc) out.push_back(mc::to_estimate(x, p));
  return out;
}

struct WeightedNorm {
  mc::MomentEstimate estimate;  ///< ‖A − B‖_{T,β} with its SE
  std::size_t argmax = 0;       ///< grid index of the supremum
};

/// (sup_t e^{−βt} E‖A(t) − B(t)‖^p)^{1/p} over the grid; SE from the
/// maximizing time.
inline WeightedNorm weighted_norm(const std::vector<Path>& a, const std::vector<Path>* b, const Grid& grid,
                                  double beta, double p) {
  const auto m = time_moments(a, b, p);
  if (m.size() != grid.size()) throw ConfigError("weighted_norm: grid mismatch");
  WeightedNorm w;
  double best = -1.0;
  for (std::size_t t = 0; t < m.size(); ++t) {
    const double v = std::exp(-beta * grid[t]) * m[t].value;
    if (v > best) {
      best = v;
      w.argmax = t;
    }
  }
  mc::MomentEstimate e = m[w.argmax];
  const double weight = std::exp(-beta * grid[w.argmax]);
  e.value *= weight;
  e.standard_error *= weight;
  w.estimate = e.root();
  return w;
}

/// Trajectories on a grid with per-time moments of ‖X(t)‖^p.
struct Ensemble {
  Grid grid;
  std::uint64_t seed = 0;
  double p = 2.0;
  std::vector<Path> paths;
  std::vector<mc::MomentEstimate> moments;

  double sup_moment() const {
    double s = 0.0;
    for (const auto& m : moments) s = std::max(s, m.value);
    return s;
  }
  /// Per-time mean of X(t) over paths.
  Path mean_path() const {
    Path m = Path::Zero(paths.front().rows(), paths.front().cols());
    for (const auto& x : paths) m += x;
    return m / static_cast<double>(paths.size());
  }
};

inline Ensemble make_ensemble(Grid grid, std::uint64_t seed, double p, std::vector<Path> paths) {
  Ensemble e{std::move(grid), seed, p, std::move(paths), {}};
  e.moments = time_moments(e.paths, nullptr, p);
  return e;
}

/// X_{j+1} = S(Δ)(X_j + B(X_j)Δ + G(X_j)ΔL_j).
inline Path exp_euler_path(const MildProblem& pr, const Grid& grid, mc::RngStream& rng) {
  const PathNoise noise = draw_path_noise(pr, grid, rng);
  Path x(static_cast<Eigen::Index>(pr.dim()), static_cast<Eigen::Index>(grid.size()));
  x.col(0) = noise.x0;
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) {
    const auto c = static_cast<Eigen::Index>(j);
    const double dt = grid[j + 1] - grid[j];
    const Eigen::VectorXd xj = x.col(c);
    x.col(c + 1) = pr.semigroup.decay(dt).cwiseProduct(
        xj + drift_value(pr, xj) * dt + diffusion_diag(pr, xj).cwiseProduct(noise.increments.col(c)));
  }
  return x;
}

/// Path i uses stream `stream_offset + i`.
inline Ensemble exp_euler_solve(const MildProblem& pr, const Grid& grid, const mc::McConfig& mc,
                                std::uint64_t stream_offset = 0) {
  validate(pr);
  validate_grid(grid, pr.horizon);
  auto paths = mc::parallel_map(mc.n_paths, mc.workers, [&](std::size_t i) {
    mc::RngStream rng(mc.seed, stream_offset + i);
    return exp_euler_path(pr, grid, rng);
  });
  return make_ensemble(grid, mc.seed, pr.p, std::move(paths));
}

enum class PicardInit { semigroup_orbit, zero, frozen_initial };

struct PicardConfig {
  mc::McConfig mc{};
  std::optional<double> beta;  ///< auto-selected when empty
  std::size_t max_iter = 60;
  double tol = 1e-8;
  PicardInit init = PicardInit::semigroup_orbit;
  std::uint64_t stream_offset = 0;
};

struct PicardIteration {
  std::size_t iter = 0;
  mc::MomentEstimate distance;  ///< d_n = ‖X^{n+1} − X^n‖_{T,β}
  double ratio = std::numeric_limits<double>::quiet_NaN();  ///< d_n / d_{n−1}
};

struct ContractionReport {
  NoiseConstant noise;
  ContractionConstants constants;
  std::optional<double> beta_min;
  double max_measured_ratio = 0.0;
  bool predicted_contraction = false;  ///< 2^{p−1}(C + C′) < 1
  std::string warning;
};

struct PicardResult {
  Ensemble ensemble;
  std::vector<PicardIteration> iterations;
  ContractionReport contraction;
  bool converged = false;
};

inline constexpr std::size_t kDivergenceRun = 3;

/// Picard iteration X^{n+1} = K(X^n) on the grid with the same noise in
/// every iteration. Stops once d_n ≤ tol. Three consecutive increases of
/// d_n raise DivergenceError.
inline PicardResult picard_solve(const MildProblem& pr, const Grid& grid, const PicardConfig& cfg) {
  validate(pr);
  validate_grid(grid, pr.horizon);
  const auto& mc = cfg.mc;

  PicardResult res;
  std::vector<double> steps;
  for (std::size_t j = 0; j + 1 < grid.size(); ++j) steps.push_back(grid[j + 1] - grid[j]);
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end(), [](double a, double b) { return b - a <= 1e-12 * b; }),
              steps.end());
  auto& rep = res.contraction;
  rep.noise = noise_continuity_constant(pr.noise, pr.p, pr.horizon, steps, mc);
  double beta = 0.0;
  if (cfg.beta) {
    beta = *cfg.beta;
  } else {
    const auto sel = select_beta(pr, rep.noise.c);
    rep.beta_min = sel.beta_min;
    beta = sel.beta.value_or(0.0);
    if (!sel.beta) rep.warning = sel.message;
  }
  rep.constants = contraction_constants(pr, beta, rep.noise.c);
  rep.predicted_contraction = rep.constants.ratio < 1.0;
  if (!rep.predicted_contraction && rep.warning.empty())
    rep.warning = "2^{p-1}(C+C') = " + std::to_string(rep.constants.ratio) + " >= 1 at beta = " + std::to_string(beta);

  const auto noise_for = [&](std::size_t i) {
    mc::RngStream rng(mc.seed, cfg.stream_offset + i);
    return draw_path_noise(pr, grid, rng);
  };
  std::vector<Path> x = mc::parallel_map(mc.n_paths, mc.workers, [&](std::size_t i) -> Path {
    const PathNoise n = noise_for(i);
    const auto k = static_cast<Eigen::Index>(pr.dim()), nt = static_cast<Eigen::Index>(grid.size());
    switch (cfg.init) {
      case PicardInit::semigroup_orbit:
        // same step products as K, so K(X⁰) = X⁰ exactly when B = G = 0
        return detail::convolve(pr, grid, n.x0, [&](std::size_t) { return Eigen::VectorXd::Zero(k); });
      case PicardInit::zero: return Path::Zero(k, nt);
      case PicardInit::frozen_initial: return n.x0.replicate(1, nt);
    }
    return Path::Zero(k, nt);
  });

  std::size_t increases = 0;
  for (std::size_t n = 0; n < cfg.max_iter; ++n) {
    std::vector<Path> next = mc::parallel_map(mc.n_paths, mc.workers, [&](std::size_t i) {
      return picard_map(pr, x[i], grid, noise_for(i));
    });
    PicardIteration it;
    it.iter = n;
    it.distance = weighted_norm(next, &x, grid, beta, pr.p).estimate;
    if (!res.iterations.empty()) {
      const double prev = res.iterations.back().distance.value;
      it.ratio = prev > 0.0 ? it.distance.value / prev : 0.0;
      if (prev > cfg.tol) rep.max_measured_ratio = std::max(rep.max_measured_ratio, it.ratio);
      increases = it.distance.value > prev ? increases + 1 : 0;
    }
    res.iterations.push_back(it);
    x = std::move(next);
    if (it.distance.value <= cfg.tol) {
      res.converged = true;
      break;
    }
    if (increases >= kDivergenceRun)
      throw DivergenceError("picard_solve: distances increased " + std::to_string(kDivergenceRun) +
                                " times in a row (last ratio " + std::to_string(it.ratio) + ")",
                            it.ratio);
  }
  res.ensemble = make_ensemble(grid, mc.seed, pr.p, std::move(x));
  return res;
}

struct AgreementReport {
  double max_z = 0.0;     ///< max_t |m_a(t) − m_b(t)| / combined SE
  std::size_t worst = 0;  ///< grid index of max_z
  double sigmas = 0.0;    ///< threshold used
  bool pass = false;
};

using mc::family_sigmas;

/// Per-time E‖X(t)‖^p of two independent ensembles within `sigmas` combined
/// SE plus an absolute allowance `extra`. By default `sigmas` is the
/// family-wise threshold for the number of grid points.
inline AgreementReport ensemble_agreement(const Ensemble& a, const Ensemble& b, std::optional<double> sigmas = {},
                                          double extra = 0.0) {
  if (a.moments.size() != b.moments.size()) throw ConfigError("ensemble_agreement: grid mismatch");
  AgreementReport r;
  r.sigmas = sigmas.value_or(family_sigmas(a.moments.size()));
  r.pass = true;
  for (std::size_t t = 0; t < a.moments.size(); ++t) {
    const double diff = std::abs(a.moments[t].value - b.moments[t].value);
    const double se = std::hypot(a.moments[t].standard_error, b.moments[t].standard_error);
    const double z = diff == 0.0 ? 0.0 : (se > 0.0 ? diff / se : std::numeric_limits<double>::infinity());
    if (z > r.max_z) {
      r.max_z = z;
      r.worst = t;
    }
    if (diff > r.sigmas * se + extra) r.pass = false;
  }
  return r;
}

struct ContinuityProbeRow {
  double eps = 0.0;
  mc::MomentEstimate increment;  ///< E‖X(t+ε) − X(t)‖^p
  double j2_bound = 0.0;         ///< c·E Σ_j Δ_j π_p((Id − S(ε))S(t − s_j)G(X(s_j)))^p
};

inline std::size_t grid_index(const Grid& grid, double t) {
  const auto it = std::lower_bound(grid.begin(), grid.end(), t - 1e-12 * std::max(1.0, t));
  if (it == grid.end() || std::abs(*it - t) > 1e-9 * std::max(1.0, t))
    throw ConfigError("time " + std::to_string(t) + " is not a grid point");
  return static_cast<std::size_t>(it - grid.begin());
}

/// E‖X(t+ε) − X(t)‖^p from the ensemble for each ε (t and t+ε must be grid
/// points). The J₂-type term is bounded through composition_decay of
/// Id − S(ε) against S(t − s_j)G(X(s_j)) on the first `operator_paths`
/// paths, scaled by the noise constant c.
inline std::vector<ContinuityProbeRow> stochastic_continuity_probe(const MildProblem& pr, const Ensemble& ens, double t,
                                                                   const std::vector<double>& eps_list, double c,
                                                                   std::size_t operator_paths = 8) {
  if (eps_list.empty()) throw ConfigError("stochastic_continuity_probe: empty epsilon list");
  const std::size_t it = grid_index(ens.grid, t);
  std::vector<ContinuityProbeRow> rows;
  for (double e : eps_list) {
    if (!(e >= 0.0)) throw ConfigError("stochastic_continuity_probe: epsilon must be >= 0");
    ContinuityProbeRow row;
    row.eps = e;
    const auto ie = static_cast<Eigen::Index>(grid_index(ens.grid, t + e));
    mc::MomentAccumulator acc;
    for (const auto& x : ens.paths)
      acc.add(std::pow((x.col(ie) - x.col(static_cast<Eigen::Index>(it))).norm(), ens.p));
    row.increment = mc::to_estimate(acc, ens.p);
    rows.push_back(row);
  }

  if (pr.diffusion.kind == DiffusionKind::zero || c == 0.0 || it == 0) return rows;
  const std::size_t n_ops = std::min(operator_paths, ens.paths.size());
  const auto phi = [&](double e) { return ps::diagonal_operator(Eigen::VectorXd::Ones(pr.dim()) - pr.semigroup.decay(e)); };
  std::vector<double> sums(eps_list.size(), 0.0);
  for (std::size_t i = 0; i < n_ops; ++i) {
    for (std::size_t j = 0; j < it; ++j) {
      const Eigen::VectorXd d = pr.semigroup.decay(t - ens.grid[j])
                                    .cwiseProduct(diffusion_diag(pr, ens.paths[i].col(static_cast<Eigen::Index>(j))));
      const auto table = ps::composition_decay(ps::diagonal_operator(d), phi, ens.p, eps_list);
      const double dt = ens.grid[j + 1] - ens.grid[j];
      for (std::size_t k = 0; k < eps_list.size(); ++k) sums[k] += dt * std::pow(table.rows[k].upper, ens.p);
    }
  }
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k].j2_bound = c * sums[k] / static_cast<double>(n_ops);
  return rows;
}

}  // namespace cylevy::spde
