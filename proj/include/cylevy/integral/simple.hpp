#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cylevy/integral/history.hpp"
#include "cylevy/levy/sampling.hpp"
#include "cylevy/levy/weak_norm.hpp"
#include "cylevy/mc/estimators.hpp"
#include "cylevy/mc/parallel.hpp"
#include "cylevy/psumming/pi_p.hpp"

namespace cylevy::integral {

using ps::FiniteRankOperator;

/// Ψ = Σ_j 1_{A_j} ψ_j with A_j = {rule(history up to s) = j}.
struct SimpleOperatorRV {
  DecisionRule rule = constant_rule(0);
  std::vector<FiniteRankOperator> operators;

  static SimpleOperatorRV constant(FiniteRankOperator op) { return {constant_rule(0), {std::move(op)}}; }

  bool deterministic() const { return operators.size() == 1; }
  Eigen::Index rows() const { return operators.front().rows(); }
  Eigen::Index cols() const { return operators.front().cols(); }

  void validate() const {
    if (operators.empty()) throw ConfigError("SimpleOperatorRV: no operator values");
    for (const auto& op : operators) {
      if (op.rows() != rows() || op.cols() != cols())
        throw ConfigError("SimpleOperatorRV: operator values differ in shape");
      if (op.domain_norm() != operators.front().domain_norm() ||
          op.codomain_norm() != operators.front().codomain_norm())
        throw ConfigError("SimpleOperatorRV: operator values differ in norm tags");
    }
  }

  /// Evaluates the rule; out-of-range indices are a configuration error.
  const FiniteRankOperator& select(const HistoryView& view, std::size_t* index = nullptr) const {
    const std::size_t j = rule(view);
    if (j >= operators.size())
      throw ConfigError("decision rule returned index " + std::to_string(j) + " for " +
                        std::to_string(operators.size()) + " operators");
    if (index) *index = j;
    return operators[j];
  }
};

/// Ψ(t) = Ψ_0 1_{0}(t) + Σ_k Ψ_k 1_{(t_k, t_{k+1}]}(t).
struct SimpleIntegrand {
  std::vector<double> partition;  ///< 0 = t_0 < … < t_N = T
  std::vector<SimpleOperatorRV> pieces;
  std::optional<FiniteRankOperator> at_zero;  ///< Ψ_0; no effect on the integral

  double horizon() const { return partition.back(); }
  Eigen::Index rows() const { return pieces.front().rows(); }
  Eigen::Index cols() const { return pieces.front().cols(); }
  ps::NormTag domain_norm() const { return pieces.front().operators.front().domain_norm(); }
  ps::NormTag codomain_norm() const { return pieces.front().operators.front().codomain_norm(); }

  bool deterministic() const {
    for (const auto& piece : pieces)
      if (!piece.deterministic()) return false;
    return true;
  }

  void validate() const {
    if (partition.size() < 2) throw ConfigError("SimpleIntegrand: partition needs at least two points");
    if (partition.front() != 0.0) throw ConfigError("SimpleIntegrand: partition must start at 0");
    for (std::size_t k = 1; k < partition.size(); ++k)
      if (!(partition[k] > partition[k - 1])) throw ConfigError("SimpleIntegrand: partition must be strictly increasing");
    if (pieces.size() != partition.size() - 1) throw ConfigError("SimpleIntegrand: one piece per interval required");
    for (const auto& piece : pieces) {
      piece.validate();
      if (piece.rows() != rows() || piece.cols() != cols()) throw ConfigError("SimpleIntegrand: shape mismatch");
    }
  }

  /// Same integrand scaled by alpha.
  SimpleIntegrand scaled(double alpha) const {
    SimpleIntegrand out = *this;
    for (auto& piece : out.pieces)
      for (auto& op : piece.operators) op = ps::scale(op, alpha);
    if (out.at_zero) out.at_zero = ps::scale(*out.at_zero, alpha);
    return out;
  }
};

/// A deterministic integrand with value ops[k] on (t_k, t_{k+1}].
inline SimpleIntegrand deterministic_integrand(std::vector<double> partition, const std::vector<FiniteRankOperator>& ops) {
  SimpleIntegrand psi;
  psi.partition = std::move(partition);
  for (const auto& op : ops) psi.pieces.push_back(SimpleOperatorRV::constant(op));
  psi.validate();
  return psi;
}

struct Radonified {
  Eigen::VectorXd value;      ///< ψ_j ΔL
  Eigen::VectorXd increment;  ///< ΔL over (s, t]
  std::size_t index = 0;      ///< selected operator
};

/// J_{s,t}(Ψ): selects ψ_j from the history up to s, then draws ΔL over
/// (s, t] independently of that history.
inline Radonified radonify(const SimpleOperatorRV& psi, double s, double t, const History& history,
                           const levy::CylLevySpec& spec, mc::RngStream& rng) {
  if (!(s < t)) throw ConfigError("radonify: need s < t");
  if (history.last_time() != s) throw ConfigError("radonify: history must cover exactly [0, s]");
  if (static_cast<std::size_t>(psi.cols()) != spec.truncation())
    throw ConfigError("radonify: operator domain must match the truncation K");
  Radonified r;
  const FiniteRankOperator& op = psi.select(HistoryView(history, s), &r.index);
  r.increment = levy::cyl_increment(spec, t - s, rng);
  r.value = op.apply(r.increment);
  return r;
}

/// One simulated path of I(Ψ) together with ∫π_p(Ψ(s))^p ds along it.
struct PathOutcome {
  Eigen::VectorXd value;
  double pi_integral = 0.0;
};

inline PathOutcome simulate_path(const SimpleIntegrand& psi, const levy::CylLevySpec& spec, double p,
                                 mc::RngStream& rng) {
  History history(static_cast<Eigen::Index>(spec.truncation()));
  PathOutcome out{Eigen::VectorXd::Zero(psi.rows()), 0.0};
  for (std::size_t k = 0; k < psi.pieces.size(); ++k) {
    const double s = psi.partition[k], t = psi.partition[k + 1];
    const Radonified r = radonify(psi.pieces[k], s, t, history, spec, rng);
    out.value += r.value;
    if (p > 0.0) out.pi_integral += (t - s) * std::pow(ps::pi_p_certified_upper(psi.pieces[k].operators[r.index], p), p);
    history.append(t, r.increment);
  }
  return out;
}

/// I(Ψ) = Σ_k J_{t_k, t_{k+1}}(Ψ_k) along one path.
inline Eigen::VectorXd integrate_simple(const SimpleIntegrand& psi, const levy::CylLevySpec& spec,
                                       mc::RngStream& rng) {
  psi.validate();
  return simulate_path(psi, spec, 0.0, rng).value;
}

/// ‖Ψ‖_Λ = (E ∫_0^T π_p(Ψ(s))^p ds)^{1/p}, with π_p replaced by its
/// certified upper bound. Deterministic integrands are evaluated exactly.
inline mc::MomentEstimate lambda_norm(const SimpleIntegrand& psi, const levy::CylLevySpec& spec, double p,
                                      const mc::McConfig& mc) {
  psi.validate();
  if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("lambda_norm: p must lie in [1, 2]");
  mc::MomentAccumulator acc;
  if (psi.deterministic()) {
    double s = 0.0;
    for (std::size_t k = 0; k < psi.pieces.size(); ++k)
      s += (psi.partition[k + 1] - psi.partition[k]) * std::pow(ps::pi_p_certified_upper(psi.pieces[k].operators[0], p), p);
    acc.add(s);
  } else {
    const auto vals = mc::parallel_map(mc.n_paths, mc.workers, [&](std::size_t i) {
      mc::RngStream rng(mc.seed, i);
      return simulate_path(psi, spec, p, rng).pi_integral;
    });
    for (double v : vals) acc.add(v);
  }
  return mc::to_estimate(acc, p).root();
}

/// L = B + M with B(t) = t·E[L(1)].
struct DriftMartingaleSplit {
  Eigen::VectorXd drift;          ///< b_k = E[ℓ_k(1)]
  levy::CylLevySpec martingale;   ///< centered modes
};

inline DriftMartingaleSplit drift_martingale_split(const levy::CylLevySpec& spec) {
  levy::validate(spec);
  DriftMartingaleSplit out;
  if (!spec.is_diagonal()) {
    // Symmetric jump laws: the compound Poisson kind is already centered.
    out.drift = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.truncation()));
    out.martingale = spec;
    return out;
  }
  const auto& modes = spec.diagonal().modes;
  out.drift.resize(static_cast<Eigen::Index>(modes.size()));
  std::vector<levy::OneDimLevySpec> centered;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    out.drift(static_cast<Eigen::Index>(k)) = levy::mean_rate(modes[k]);
    if (const auto* d = std::get_if<levy::DriftedCompoundPoisson>(&modes[k]))
      centered.push_back(levy::CompoundPoisson{d->rate, d->jumps});
    else
      centered.push_back(modes[k]);
  }
  out.martingale = levy::CylLevySpec{levy::DiagonalCyl{std::move(centered)}};
  return out;
}

/// Smallest KS p-value over modes comparing ℓ_k(t) with b_k t + M_k(t).
inline double split_recombination_pvalue(const levy::CylLevySpec& spec, double t, std::size_t n, std::uint64_t seed) {
  const auto split = drift_martingale_split(spec);
  double worst = 1.0;
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(spec.truncation()); ++k) {
    std::vector<double> original(n), recombined(n);
    mc::RngStream a(seed, 2 * static_cast<std::uint64_t>(k)), b(seed, 2 * static_cast<std::uint64_t>(k) + 1);
    for (std::size_t i = 0; i < n; ++i) {
      original[i] = levy::cyl_increment(spec, t, a)(k);
      recombined[i] = split.drift(k) * t + levy::cyl_increment(split.martingale, t, b)(k);
    }
    worst = std::min(worst, mc::ks_two_sample(original, recombined).p_value);
  }
  return worst;
}

/// E‖I(Ψ)‖₂² for deterministic Ψ and finite-variance noise:
/// Σ_k Δt_k tr(ψ_k Σ ψ_kᵀ) + ‖Σ_k Δt_k ψ_k b‖².
inline double isometry_second_moment(const SimpleIntegrand& psi, const levy::CylLevySpec& spec) {
  psi.validate();
  if (!psi.deterministic()) throw ConfigError("isometry_second_moment: deterministic integrand required");
  const Eigen::MatrixXd sigma = levy::covariance_rate(spec);
  if (!sigma.allFinite()) throw AssumptionError("isometry_second_moment: noise has infinite variance");
  const Eigen::VectorXd b = levy::drift_vector(spec);
  double martingale = 0.0;
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(psi.rows());
  for (std::size_t k = 0; k < psi.pieces.size(); ++k) {
    const double dt = psi.partition[k + 1] - psi.partition[k];
    const Eigen::MatrixXd& m = psi.pieces[k].operators[0].matrix();
    martingale += dt * (m * sigma * m.transpose()).trace();
    mean += dt * m * b;
  }
  return martingale + mean.squaredNorm();
}

}  // namespace cylevy::integral
