#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cylevy/errors.hpp"
#include "cylevy/mc/rng.hpp"

namespace cylevy::ps {

/// Norm carried by R^n: ℓ¹, ℓ² or ℓ^∞.
enum class NormTag { l1, l2, linf };

inline std::string to_string(NormTag t) {
  switch (t) {
    case NormTag::l1: return "l1";
    case NormTag::l2: return "l2";
    case NormTag::linf: return "linf";
  }
  return "?";
}

inline NormTag parse_norm_tag(const std::string& s) {
  if (s == "l1") return NormTag::l1;
  if (s == "l2") return NormTag::l2;
  if (s == "linf") return NormTag::linf;
  throw ConfigError("unknown norm tag '" + s + "'");
}

/// Norm of the dual space: ℓ¹ ↔ ℓ^∞, ℓ² ↔ ℓ².
inline NormTag dual(NormTag t) {
  switch (t) {
    case NormTag::l1: return NormTag::linf;
    case NormTag::linf: return NormTag::l1;
    default: return NormTag::l2;
  }
}

template <class Derived>
double norm(const Eigen::MatrixBase<Derived>& v, NormTag t) {
  switch (t) {
    case NormTag::l1: return v.template lpNorm<1>();
    case NormTag::linf: return v.size() == 0 ? 0.0 : v.template lpNorm<Eigen::Infinity>();
    default: return v.norm();
  }
}

/// One term x* ⊗ y, acting as x ↦ x*(x)·y.
struct RankOne {
  Eigen::VectorXd functional;
  Eigen::VectorXd vector;
};

inline constexpr double kReconstructionTol = 1e-12;

/// Linear map R^{K_in} → R^{K_out} with norm tags on both sides and an
/// optional rank-one decomposition used for π_p upper bounds.
class FiniteRankOperator {
 public:
  FiniteRankOperator() = default;

  explicit FiniteRankOperator(Eigen::MatrixXd matrix, NormTag domain = NormTag::l2, NormTag codomain = NormTag::l2,
                              std::optional<std::vector<RankOne>> decomposition = std::nullopt)
      : matrix_(std::move(matrix)), domain_(domain), codomain_(codomain), decomposition_(std::move(decomposition)) {
    if (codomain_ == NormTag::linf) throw ConfigError("FiniteRankOperator: codomain must be l1 or l2");
    if (!matrix_.allFinite()) throw ConfigError("FiniteRankOperator: matrix has non-finite entries");
    if (decomposition_) check_decomposition();
  }

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  NormTag domain_norm() const { return domain_; }
  NormTag codomain_norm() const { return codomain_; }
  const std::optional<std::vector<RankOne>>& decomposition() const { return decomposition_; }
  Eigen::Index rows() const { return matrix_.rows(); }
  Eigen::Index cols() const { return matrix_.cols(); }

  bool is_diagonal() const {
    for (Eigen::Index j = 0; j < matrix_.cols(); ++j)
      for (Eigen::Index i = 0; i < matrix_.rows(); ++i)
        if (i != j && matrix_(i, j) != 0.0) return false;
    return true;
  }

  bool hilbert() const { return domain_ == NormTag::l2 && codomain_ == NormTag::l2; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix_ * x; }

  FiniteRankOperator with_decomposition(std::vector<RankOne> terms) const {
    return FiniteRankOperator(matrix_, domain_, codomain_, std::move(terms));
  }
  FiniteRankOperator without_decomposition() const { return FiniteRankOperator(matrix_, domain_, codomain_); }

 private:
  void check_decomposition() const {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(matrix_.rows(), matrix_.cols());
    for (const auto& t : *decomposition_) {
      if (t.functional.size() != matrix_.cols() || t.vector.size() != matrix_.rows())
        throw ConfigError("FiniteRankOperator: decomposition term has wrong dimensions");
      sum += t.vector * t.functional.transpose();
    }
    if ((sum - matrix_).cwiseAbs().maxCoeff() > kReconstructionTol * std::max(1.0, matrix_.cwiseAbs().maxCoeff()))
      throw ConfigError("FiniteRankOperator: decomposition does not reconstruct the matrix");
  }

  Eigen::MatrixXd matrix_;
  NormTag domain_ = NormTag::l2;
  NormTag codomain_ = NormTag::l2;
  std::optional<std::vector<RankOne>> decomposition_;
};

inline FiniteRankOperator diagonal_operator(const Eigen::VectorXd& d, NormTag domain = NormTag::l2,
                                            NormTag codomain = NormTag::l2) {
  return FiniteRankOperator(d.asDiagonal().toDenseMatrix(), domain, codomain);
}

inline FiniteRankOperator rank_one(const Eigen::VectorXd& functional, const Eigen::VectorXd& vector,
                                   NormTag domain = NormTag::l2, NormTag codomain = NormTag::l2) {
  return FiniteRankOperator(vector * functional.transpose(), domain, codomain,
                            std::vector<RankOne>{{functional, vector}});
}

/// A = Σ_j e_j ⊗ A e_j.
inline std::vector<RankOne> column_decomposition(const Eigen::MatrixXd& a) {
  std::vector<RankOne> terms;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (a.col(j).isZero(0.0)) continue;
    terms.push_back({Eigen::VectorXd::Unit(a.cols(), j), a.col(j)});
  }
  return terms;
}

/// A = Σ_i σ_i v_i ⊗ u_i.
inline std::vector<RankOne> svd_decomposition(const Eigen::MatrixXd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  std::vector<RankOne> terms;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double s = svd.singularValues()(i);
    if (s == 0.0) continue;
    terms.push_back({svd.matrixV().col(i), s * svd.matrixU().col(i)});
  }
  return terms;
}

/// φ ∘ ψ. A decomposition Σ x*_k ⊗ y_k of ψ carries over as Σ x*_k ⊗ φ y_k.
inline FiniteRankOperator compose(const FiniteRankOperator& phi, const FiniteRankOperator& psi) {
  if (phi.cols() != psi.rows()) throw ConfigError("compose: dimension mismatch");
  std::optional<std::vector<RankOne>> terms;
  if (psi.decomposition()) {
    terms.emplace();
    for (const auto& t : *psi.decomposition()) terms->push_back({t.functional, phi.matrix() * t.vector});
  }
  return FiniteRankOperator(phi.matrix() * psi.matrix(), psi.domain_norm(), phi.codomain_norm(), std::move(terms));
}

inline FiniteRankOperator scale(const FiniteRankOperator& op, double alpha) {
  std::optional<std::vector<RankOne>> terms;
  if (op.decomposition()) {
    terms.emplace();
    for (const auto& t : *op.decomposition()) terms->push_back({t.functional, alpha * t.vector});
  }
  return FiniteRankOperator(alpha * op.matrix(), op.domain_norm(), op.codomain_norm(), std::move(terms));
}

/// a + b. Stored decompositions are concatenated when both are present.
inline FiniteRankOperator add(const FiniteRankOperator& a, const FiniteRankOperator& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ConfigError("add: dimension mismatch");
  if (a.domain_norm() != b.domain_norm() || a.codomain_norm() != b.codomain_norm())
    throw ConfigError("add: norm tags differ");
  std::optional<std::vector<RankOne>> terms;
  if (a.decomposition() && b.decomposition()) {
    terms = *a.decomposition();
    terms->insert(terms->end(), b.decomposition()->begin(), b.decomposition()->end());
  }
  return FiniteRankOperator(a.matrix() + b.matrix(), a.domain_norm(), a.codomain_norm(), std::move(terms));
}

/// Largest dimension for which ℓ^∞-ball vertices are enumerated.
inline constexpr Eigen::Index kMaxSignEnumeration = 16;

struct OperatorNorm {
  double value = 0.0;
  Eigen::VectorXd maximizer;  ///< unit vector of the domain with ‖A x‖ = value
  bool exact = true;          ///< false when found by ascent (a lower bound)
};

namespace detail {

inline Eigen::VectorXd sign_vector(std::uint64_t bits, Eigen::Index n) {
  Eigen::VectorXd s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = ((bits >> i) & 1U) ? -1.0 : 1.0;
  return s;
}

/// argmax of <g, x> over the unit ball of `t`.
inline Eigen::VectorXd ball_argmax(const Eigen::VectorXd& g, NormTag t) {
  const Eigen::Index n = g.size();
  switch (t) {
    case NormTag::linf: return g.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
    case NormTag::l1: {
      Eigen::Index i = 0;
      g.cwiseAbs().maxCoeff(&i);
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e(i) = g(i) < 0.0 ? -1.0 : 1.0;
      return e;
    }
    default: {
      const double gn = g.norm();
      return gn > 0.0 ? Eigen::VectorXd(g / gn) : Eigen::VectorXd::Unit(n, 0);
    }
  }
}

}  // namespace detail

/// sup_{‖x‖_dom ≤ 1} ‖A x‖_cod.
///
/// Exact for ℓ¹ domains (largest column), ℓ²→ℓ² (largest singular value) and
/// whenever one side's extreme points can be enumerated. Otherwise
/// alternating ascent on the bilinear form y*ᵀAx with restarts.
inline OperatorNorm operator_norm(const FiniteRankOperator& op, std::uint64_t seed = 1, int restarts = 32) {
  const Eigen::MatrixXd& a = op.matrix();
  const Eigen::Index n = a.cols();
  const NormTag dom = op.domain_norm(), cod = op.codomain_norm();
  OperatorNorm best{0.0, n > 0 ? Eigen::VectorXd::Unit(n, 0) : Eigen::VectorXd(), true};
  if (n == 0 || a.rows() == 0) return best;

  if (dom == NormTag::l1) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = norm(a.col(j), cod);
      if (v > best.value) best = {v, Eigen::VectorXd::Unit(n, j), true};
    }
    return best;
  }
  if (dom == NormTag::l2 && cod == NormTag::l2) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
    best.value = svd.singularValues()(0);
    best.maximizer = svd.matrixV().col(0);
    return best;
  }
  if (dom == NormTag::linf && n <= kMaxSignEnumeration) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (n - 1)); ++bits) {
      const Eigen::VectorXd x = detail::sign_vector(bits, n);
      const double v = norm(a * x, cod);
      if (v > best.value) best = {v, x, true};
    }
    return best;
  }
  if (cod == NormTag::l1 && a.rows() <= kMaxSignEnumeration) {
    // ‖Ax‖₁ = sup_s sᵀAx, so the norm is sup_s ‖Aᵀs‖_{dual(dom)}.
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (a.rows() - 1)); ++bits) {
      const Eigen::VectorXd g = a.transpose() * detail::sign_vector(bits, a.rows());
      const Eigen::VectorXd x = detail::ball_argmax(g, dom);
      const double v = norm(a * x, cod);
      if (v > best.value) best = {v, x, true};
    }
    return best;
  }

  best.exact = false;
  mc::RngStream rng(seed, 0x09e7);
  std::normal_distribution<double> n01;
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = n01(rng);
    x = detail::ball_argmax(x, dom);
    double value = norm(a * x, cod);
    for (int it = 0; it < 200; ++it) {
      const Eigen::VectorXd y = detail::ball_argmax(a * x, dual(cod));
      const Eigen::VectorXd x_next = detail::ball_argmax(a.transpose() * y, dom);
      const double v = norm(a * x_next, cod);
      if (v <= value * (1.0 + 1e-12)) break;
      x = x_next;
      value = v;
    }
    if (value > best.value) best = {value, x, false};
  }
  return best;
}

}  // namespace cylevy::ps
