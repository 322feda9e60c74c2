#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cylevy/psumming/operator.hpp"

namespace cylevy::ps {

/// Hilbert–Schmidt (Frobenius) norm; requires ℓ²/ℓ² tags.
inline double hs_norm(const FiniteRankOperator& op) {
  if (!op.hilbert()) throw ConfigError("hs_norm: requires l2 domain and l2 codomain");
  return op.matrix().norm();
}

/// Σ_k ‖x*_k‖_{dual}·‖y_k‖ for a rank-one decomposition.
inline double decomposition_bound(const std::vector<RankOne>& terms, NormTag domain, NormTag codomain) {
  double s = 0.0;
  for (const auto& t : terms) s += norm(t.functional, dual(domain)) * norm(t.vector, codomain);
  return s;
}

/// Upper bound on π_p(op) by the triangle inequality over one rank-one
/// decomposition: the stored one if present, else the coordinate
/// decomposition of a diagonal matrix, else the SVD for ℓ²/ℓ².
inline double pi_p_upper(const FiniteRankOperator& op, double p) {
  if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("pi_p_upper: p must lie in [1, 2]");
  if (op.decomposition()) return decomposition_bound(*op.decomposition(), op.domain_norm(), op.codomain_norm());
  if (op.is_diagonal()) return op.matrix().diagonal().cwiseAbs().sum();
  if (op.hilbert()) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(op.matrix());
    return svd.singularValues().sum();
  }
  throw ConfigError("pi_p_upper: operator with " + to_string(op.domain_norm()) + "/" + to_string(op.codomain_norm()) +
                    " tags needs an explicit rank-one decomposition");
}

struct PiPSearchConfig {
  std::uint64_t seed = 1;
  int random_families = 8;
  int restarts = 32;  ///< restarts of the inner supremum
  double tol = 1e-6;
};

/// Best ratio found by the lower-bound search and how it was attained.
struct PiPLower {
  double value = 0.0;
  std::string family;               ///< which candidate family attained it
  Eigen::VectorXd dual_maximizer;   ///< x* attaining the inner sup for that family
};

namespace detail {

/// sup_{x* ∈ B} Σ_k |x*(x_k)|^p over the unit ball B of `ball`, for the
/// columns x_k of `family`. The objective is convex in x*, so its maximum is
/// at an extreme point.
inline std::pair<double, Eigen::VectorXd> weak_family_sup(const Eigen::MatrixXd& family, double p, NormTag ball,
                                                          const PiPSearchConfig& cfg) {
  const Eigen::Index k = family.rows();
  const auto objective = [&](const Eigen::VectorXd& x) {
    return (family.transpose() * x).array().abs().pow(p).sum();
  };
  double best = -1.0;
  Eigen::VectorXd best_x = Eigen::VectorXd::Unit(k, 0);
  const auto consider = [&](const Eigen::VectorXd& x) {
    const double v = objective(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  };

  if (ball == NormTag::l1) {
    for (Eigen::Index i = 0; i < k; ++i) consider(Eigen::VectorXd::Unit(k, i));
    return {best, best_x};
  }
  if (ball == NormTag::linf && k <= kMaxSignEnumeration) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (k - 1)); ++bits) consider(sign_vector(bits, k));
    return {best, best_x};
  }
  if (ball == NormTag::l2 && p == 2.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(family * family.transpose());
    const Eigen::Index top = k - 1;
    return {std::max(0.0, eig.eigenvalues()(top)), eig.eigenvectors().col(top)};
  }

  // Ascent x ← argmax_B <∇f(x), ·> from the coordinate directions plus
  // seeded random starts.
  mc::RngStream rng(cfg.seed, 0x5011);
  std::normal_distribution<double> n01;
  std::vector<Eigen::VectorXd> starts;
  for (Eigen::Index i = 0; i < k && static_cast<int>(starts.size()) < cfg.restarts / 2; ++i)
    starts.push_back(ball_argmax(Eigen::VectorXd::Unit(k, i), ball));
  while (static_cast<int>(starts.size()) < cfg.restarts) {
    Eigen::VectorXd g(k);
    for (Eigen::Index i = 0; i < k; ++i) g(i) = n01(rng);
    starts.push_back(ball_argmax(g, ball));
  }
  for (Eigen::VectorXd x : starts) {
    double value = objective(x);
    for (int it = 0; it < 500; ++it) {
      const Eigen::ArrayXd proj = family.transpose() * x;
      const Eigen::VectorXd w = (proj.abs().pow(p - 1.0) * proj.sign()).matrix();
      const Eigen::VectorXd next = ball_argmax(family * w, ball);
      const double v = objective(next);
      if (v <= value * (1.0 + cfg.tol)) {
        if (v > value) {
          x = next;
          value = v;
        }
        break;
      }
      x = next;
      value = v;
    }
    consider(x);
  }
  return {best, best_x};
}

inline double family_ratio(const FiniteRankOperator& op, const Eigen::MatrixXd& family, double p,
                           const PiPSearchConfig& cfg, Eigen::VectorXd* witness) {
  const Eigen::MatrixXd images = op.matrix() * family;
  double num = 0.0;
  for (Eigen::Index j = 0; j < images.cols(); ++j) num += std::pow(norm(images.col(j), op.codomain_norm()), p);
  const auto [den, x] = weak_family_sup(family, p, dual(op.domain_norm()), cfg);
  if (!(den > 0.0)) throw ConfigError("pi_p_lower: degenerate test family");
  if (witness) *witness = x;
  return std::pow(num / den, 1.0 / p);
}

}  // namespace detail

/// Lower bound on π_p(op) from the defining inequality: the best ratio
/// (Σ‖u x_k‖^p)^{1/p} / sup_{x*}(Σ|x*(x_k)|^p)^{1/p} over candidate families
/// (canonical basis, operator-norm maximizer, right singular vectors,
/// seeded Gaussian families).
inline PiPLower pi_p_lower(const FiniteRankOperator& op, double p, const PiPSearchConfig& cfg = {}) {
  if (!(p >= 1.0 && p <= 2.0)) throw ConfigError("pi_p_lower: p must lie in [1, 2]");
  const Eigen::Index n = op.cols();
  PiPLower best{0.0, "none", Eigen::VectorXd()};
  if (n == 0 || op.rows() == 0 || op.matrix().isZero(0.0)) return best;

  const auto consider = [&](const Eigen::MatrixXd& family, const std::string& name) {
    Eigen::VectorXd w;
    const double r = detail::family_ratio(op, family, p, cfg, &w);
    if (r > best.value) best = {r, name, w};
  };

  consider(Eigen::MatrixXd::Identity(n, n), "canonical basis");
  const OperatorNorm on = operator_norm(op, cfg.seed);
  consider(on.maximizer, "operator-norm maximizer");
  if (op.domain_norm() == NormTag::l2) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(op.matrix(), Eigen::ComputeFullV);
    consider(svd.matrixV(), "right singular vectors");
  }
  mc::RngStream rng(cfg.seed, 0xfa31);
  std::normal_distribution<double> n01;
  for (int f = 0; f < cfg.random_families; ++f) {
    Eigen::MatrixXd family(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) family(i, j) = n01(rng);
    consider(family, "random family " + std::to_string(f));
  }
  return best;
}

/// Certified interval for π_p(op).
struct PiPBounds {
  double lower = 0.0;
  double upper = 0.0;
  double p = 1.0;
  std::string notes;

  double gap() const { return upper - lower; }
};

/// For p = 2 on ℓ²/ℓ² both ends are the Hilbert–Schmidt norm.
inline PiPBounds pi_p_bounds(const FiniteRankOperator& op, double p, const PiPSearchConfig& cfg = {}) {
  PiPBounds b;
  b.p = p;
  if (p == 2.0 && op.hilbert()) {
    b.lower = b.upper = hs_norm(op);
    b.notes = "p = 2 on l2/l2: Hilbert-Schmidt norm";
    return b;
  }
  b.upper = pi_p_upper(op, p);
  const PiPLower lo = pi_p_lower(op, p, cfg);
  b.lower = lo.value;
  b.notes = "upper: rank-one decomposition; lower: " + lo.family;
  return b;
}

/// Tightest certified upper bound on π_p(op); the value used inside Λ-norms.
inline double pi_p_certified_upper(const FiniteRankOperator& op, double p) {
  if (p == 2.0 && op.hilbert()) return hs_norm(op);
  return pi_p_upper(op, p);
}

/// Certified upper bound for a bare matrix. Operators that need an explicit
/// decomposition get the column decomposition.
inline double pi_p_upper_matrix(const Eigen::MatrixXd& m, NormTag domain, NormTag codomain, double p) {
  const FiniteRankOperator op(m, domain, codomain);
  if (op.hilbert() || op.is_diagonal()) return pi_p_certified_upper(op, p);
  return decomposition_bound(column_decomposition(m), domain, codomain);
}

}  // namespace cylevy::ps
