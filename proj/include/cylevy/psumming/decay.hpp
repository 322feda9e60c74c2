#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "cylevy/psumming/pi_p.hpp"

namespace cylevy::ps {

struct DecayRow {
  double param = 0.0;  ///< ε (or n) indexing φ
  double upper = 0.0;  ///< certified upper bound on π_p(φψ)
  double lower = 0.0;  ///< lower bound; equals upper when certified exact
  double hs = std::numeric_limits<double>::quiet_NaN();      ///< HS norm if ℓ²/ℓ²
  double oracle = std::numeric_limits<double>::quiet_NaN();  ///< caller-supplied reference
};

struct DecayTable {
  double p = 1.0;
  std::vector<DecayRow> rows;
  bool monotone = false;   ///< upper is non-increasing along the given order
  bool converged = false;  ///< last upper ≤ threshold · first upper
  double threshold = 1e-3;
};

struct DecayConfig {
  double threshold = 1e-3;
  double monotone_tol = 1e-12;  ///< relative slack in the monotonicity check
  bool lower_bounds = false;    ///< also run pi_p_lower on every row
  PiPSearchConfig search{};
};

/// π_p(φ_param ∘ ψ) along a family of contractions, in the order given.
/// For a family converging strongly to 0 the values should fall to 0.
inline DecayTable composition_decay(const FiniteRankOperator& psi,
                                    const std::function<FiniteRankOperator(double)>& phi, double p,
                                    const std::vector<double>& params,
                                    const std::function<double(double)>& oracle = {}, const DecayConfig& cfg = {}) {
  if (params.empty()) throw ConfigError("composition_decay: empty parameter list");
  DecayTable t;
  t.p = p;
  t.threshold = cfg.threshold;
  for (double e : params) {
    const FiniteRankOperator op = compose(phi(e), psi);
    DecayRow row;
    row.param = e;
    row.upper = pi_p_certified_upper(op, p);
    if (op.hilbert()) row.hs = hs_norm(op);
    if (p == 2.0 && op.hilbert())
      row.lower = row.upper;
    else if (cfg.lower_bounds)
      row.lower = pi_p_lower(op, p, cfg.search).value;
    if (oracle) row.oracle = oracle(e);
    t.rows.push_back(row);
  }
  t.monotone = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    if (t.rows[i].upper > t.rows[i - 1].upper * (1.0 + cfg.monotone_tol)) t.monotone = false;
  const double first = t.rows.front().upper;
  t.converged = first == 0.0 || t.rows.back().upper <= cfg.threshold * first;
  return t;
}

/// φ_n = e_n ⊗ e_n on ℓ² composed with the identity ℓ¹ → ℓ² (K = n_max).
/// Both π₁ bounds equal 1 for every n, so the table never converges.
inline DecayTable l1_l2_counterexample(int n_max, const DecayConfig& cfg = {}) {
  if (n_max < 1) throw ConfigError("l1_l2_counterexample: n_max must be >= 1");
  const Eigen::Index k = n_max;
  const FiniteRankOperator id(Eigen::MatrixXd::Identity(k, k), NormTag::l1, NormTag::l2,
                              column_decomposition(Eigen::MatrixXd::Identity(k, k)));
  const auto phi = [k](double n) {
    const auto i = static_cast<Eigen::Index>(n) - 1;
    return rank_one(Eigen::VectorXd::Unit(k, i), Eigen::VectorXd::Unit(k, i));
  };
  std::vector<double> ns;
  for (int n = 1; n <= n_max; ++n) ns.push_back(n);
  DecayConfig c = cfg;
  c.lower_bounds = true;
  return composition_decay(id, phi, 1.0, ns, {}, c);
}

/// Σ_{k ≤ K} (1 − e^{−εk²π²})²/k², square-rooted: the truncated-series value
/// of ‖(Id − S(ε))·diag(1/k)‖_HS for the heat semigroup.
inline double heat_decay_series(double eps, int k_max) {
  double s = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    const double d = -std::expm1(-eps * k * k * std::numbers::pi * std::numbers::pi);
    s += d * d / (static_cast<double>(k) * k);
  }
  return std::sqrt(s);
}

}  // namespace cylevy::ps
