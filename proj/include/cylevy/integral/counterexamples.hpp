#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cylevy/integral/simple.hpp"
#include "cylevy/levy/moments.hpp"

namespace cylevy::integral {

inline constexpr double kSlopeTolerance = 0.05;

struct SlopeRow {
  double n = 1.0;
  mc::MomentEstimate lhs;  ///< E|∫Ψ_n dL|^p
  double lambda_p = 0.0;   ///< E∫|Ψ_n|^p dt = 1/n
  double ratio = 0.0;
  double ratio_se = 0.0;
  double reference = 0.0;        ///< closed form (Gaussian) or n^{-p/α}·E|L(1)|^p (stable)
  double reference_se = 0.0;
  bool reference_pass = false;   ///< |lhs − reference| ≤ 3 combined SE
};

struct SlopeReport {
  std::string family;
  double p = 1.0;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double expected_slope = 0.0;
  bool lhs_infinite = false;
  std::vector<SlopeRow> rows;
  std::optional<mc::LogLogFit> fit;
  bool slope_pass = false;
  bool reference_pass = false;
  double reference_sigmas = mc::kSlackSigmas;  ///< family-wise threshold over the rows
  std::string message;
};

namespace detail {

/// Ψ_n = 1_{[0,1/n]} on [0, max(1, 1/n)].
inline SimpleIntegrand indicator_integrand(double n) {
  const FiniteRankOperator one(Eigen::MatrixXd::Identity(1, 1));
  const FiniteRankOperator zero(Eigen::MatrixXd::Zero(1, 1));
  if (n <= 1.0) return deterministic_integrand({0.0, 1.0 / n}, {one});
  return deterministic_integrand({0.0, 1.0 / n, 1.0}, {one, zero});
}

inline mc::MomentEstimate indicator_moment(const levy::CylLevySpec& spec, double n, double p, const mc::McConfig& mc,
                                           std::uint64_t block) {
  const SimpleIntegrand psi = indicator_integrand(n);
  const auto vals = mc::parallel_map(mc.n_paths, mc.workers, [&](std::size_t i) {
    mc::RngStream rng(mc.seed, block * mc.n_paths + i);
    return std::pow(std::abs(simulate_path(psi, spec, 0.0, rng).value(0)), p);
  });
  mc::MomentAccumulator acc;
  for (double v : vals) acc.add(v);
  return mc::to_estimate(acc, p);
}

inline void fill_ratio(SlopeRow& row) {
  row.lambda_p = 1.0 / row.n;
  row.ratio = row.lhs.value / row.lambda_p;
  row.ratio_se = row.lhs.standard_error / row.lambda_p;
}

inline void fit_slope(SlopeReport& r) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : r.rows) pts.emplace_back(row.n, row.ratio);
  r.fit = mc::fit_loglog_slope(pts);
  r.slope_pass = std::abs(r.fit->slope - r.expected_slope) <= kSlopeTolerance;
  r.reference_pass = true;
  for (const auto& row : r.rows) r.reference_pass = r.reference_pass && row.reference_pass;
}

}  // namespace detail

/// Ratio E|∫Ψ_n dW|^p / E∫|Ψ_n|^p dt for Ψ_n = 1_{[0,1/n]}; its log-log slope
/// in n is 1 − p/2, so no continuity constant exists for p < 2.
inline SlopeReport gaussian_counterexample(double p, const std::vector<double>& n_list, const mc::McConfig& mc) {
  if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("gaussian_counterexample: p must lie in [1, 2]");
  SlopeReport r;
  r.family = "brownian";
  r.p = p;
  r.expected_slope = 1.0 - p / 2.0;
  r.reference_sigmas = mc::family_sigmas(n_list.size());
  const auto spec = levy::make_diagonal({levy::BrownianMotion{1.0}});
  for (std::size_t j = 0; j < n_list.size(); ++j) {
    SlopeRow row;
    row.n = n_list[j];
    row.lhs = detail::indicator_moment(spec, row.n, p, mc, j);
    detail::fill_ratio(row);
    row.reference = std::pow(1.0 / row.n, p / 2.0) * levy::gaussian_abs_moment(p);
    row.reference_pass = std::abs(row.lhs.value - row.reference) <= r.reference_sigmas * row.lhs.standard_error;
    r.rows.push_back(row);
  }
  detail::fit_slope(r);
  return r;
}

/// Same ratio for a symmetric α-stable process; slope (α − p)/α. Also
/// checks E|L(1/n)|^p = n^{−p/α} E|L(1)|^p against an independent estimate
/// of E|L(1)|^p.
inline SlopeReport stable_counterexample(double alpha, double p, const std::vector<double>& n_list,
                                         const mc::McConfig& mc) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw ConfigError("stable_counterexample: alpha must lie in (0, 2)");
  SlopeReport r;
  r.family = "stable";
  r.p = p;
  r.alpha = alpha;
  r.expected_slope = (alpha - p) / alpha;
  if (p >= alpha) {
    r.lhs_infinite = true;
    r.message = "lhs infinite: E|L(t)|^p = inf for p >= alpha";
    return r;
  }
  const auto spec = levy::make_diagonal({levy::SymmetricAlphaStable{alpha, 1.0}});

  // E|L(1)|^p: reuse the n = 1 row when present, else a separate block.
  std::optional<std::size_t> unit_row;
  for (std::size_t j = 0; j < n_list.size(); ++j)
    if (n_list[j] == 1.0) unit_row = j;
  r.reference_sigmas = mc::family_sigmas(n_list.size() - (unit_row ? 1 : 0));
  const mc::MomentEstimate unit =
      detail::indicator_moment(spec, 1.0, p, mc, unit_row.value_or(n_list.size()));

  for (std::size_t j = 0; j < n_list.size(); ++j) {
    SlopeRow row;
    row.n = n_list[j];
    row.lhs = (unit_row && j == *unit_row) ? unit : detail::indicator_moment(spec, row.n, p, mc, j);
    detail::fill_ratio(row);
    const double scale = std::pow(row.n, -p / alpha);
    row.reference = scale * unit.value;
    row.reference_se = scale * unit.standard_error;
    const double se = (unit_row && j == *unit_row) ? 0.0 : std::hypot(row.lhs.standard_error, row.reference_se);
    row.reference_pass = std::abs(row.lhs.value - row.reference) <= r.reference_sigmas * se;
    r.rows.push_back(row);
  }
  detail::fit_slope(r);
  return r;
}

/// Dyadic n = 1, 2, 4, …, n_max.
inline std::vector<double> dyadic(double n_max) {
  std::vector<double> ns;
  for (double n = 1.0; n <= n_max; n *= 2.0) ns.push_back(n);
  return ns;
}

}  // namespace cylevy::integral
