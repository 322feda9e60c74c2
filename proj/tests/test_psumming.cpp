#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cylevy/psumming/decay.hpp"
#include "cylevy/psumming/schwartz.hpp"

using namespace cylevy;
using namespace cylevy::ps;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n01;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n01(rng);
  return m;
}

// Brute force over the extreme points of the domain ball (small dimensions).
double brute_operator_norm(const Eigen::MatrixXd& a, NormTag dom, NormTag cod) {
  const Eigen::Index n = a.cols();
  double best = 0.0;
  if (dom == NormTag::l1) {
    for (Eigen::Index j = 0; j < n; ++j) best = std::max(best, norm(a.col(j), cod));
  } else if (dom == NormTag::linf) {
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      Eigen::VectorXd x(n);
      for (Eigen::Index i = 0; i < n; ++i) x(i) = (bits >> i) & 1U ? 1.0 : -1.0;
      best = std::max(best, norm(a * x, cod));
    }
  } else {
    // ℓ² domain, ℓ¹ codomain: sup_s ‖Aᵀs‖₂ over sign vectors s.
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << a.rows()); ++bits) {
      Eigen::VectorXd s(a.rows());
      for (Eigen::Index i = 0; i < a.rows(); ++i) s(i) = (bits >> i) & 1U ? 1.0 : -1.0;
      best = std::max(best, (a.transpose() * s).norm());
    }
  }
  return best;
}

std::vector<FiniteRankOperator> random_operators(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const NormTag doms[] = {NormTag::l1, NormTag::l2, NormTag::linf};
  const NormTag cods[] = {NormTag::l1, NormTag::l2};
  std::vector<FiniteRankOperator> ops;
  for (int i = 0; i < count; ++i) {
    const Eigen::Index r = 1 + static_cast<Eigen::Index>(rng() % 5), c = 1 + static_cast<Eigen::Index>(rng() % 5);
    const Eigen::MatrixXd m = random_matrix(r, c, rng);
    const NormTag dom = doms[i % 3], cod = cods[(i / 3) % 2];
    ops.emplace_back(m, dom, cod, column_decomposition(m));
  }
  return ops;
}

}  // namespace

TEST(FiniteRankOperator, DecompositionMustReconstruct) {
  const Eigen::Vector2d x(1, 2), y(3, -1);
  EXPECT_NO_THROW(FiniteRankOperator(y * x.transpose(), NormTag::l2, NormTag::l2, std::vector<RankOne>{{x, y}}));
  EXPECT_THROW(FiniteRankOperator(y * x.transpose() * 1.001, NormTag::l2, NormTag::l2, std::vector<RankOne>{{x, y}}),
               ConfigError);
  EXPECT_THROW(FiniteRankOperator(Eigen::MatrixXd::Identity(2, 2), NormTag::l2, NormTag::linf), ConfigError);
}

TEST(HsNorm, Examples) {
  EXPECT_NEAR(hs_norm(diagonal_operator(Eigen::Vector3d(1.0, 0.5, 1.0 / 3))), 7.0 / 6.0, 1e-15);
  EXPECT_EQ(hs_norm(FiniteRankOperator(Eigen::MatrixXd::Zero(3, 2))), 0.0);
  const Eigen::Vector3d x(1, -2, 2);
  const Eigen::Vector2d y(3, 4);
  EXPECT_NEAR(hs_norm(rank_one(x, y)), 15.0, 1e-13);
  EXPECT_THROW(hs_norm(diagonal_operator(Eigen::Vector2d(1, 1), NormTag::l1)), ConfigError);
}

TEST(PiPUpper, Examples) {
  EXPECT_DOUBLE_EQ(pi_p_upper(rank_one(Eigen::Vector3d::Unit(0), Eigen::Vector3d::Unit(0)), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(pi_p_upper(diagonal_operator(Eigen::Vector3d(1, -2, 0.5)), 1.3), 3.5);
  EXPECT_DOUBLE_EQ(pi_p_upper(diagonal_operator(Eigen::Vector2d(3, 4)), 2.0), 7.0);
  // A rotated diag(3, 4): non-diagonal, so the SVD decomposition is used.
  const double c = std::cos(0.7), s = std::sin(0.7);
  Eigen::Matrix2d rot;
  rot << c, -s, s, c;
  const FiniteRankOperator rotated(rot * Eigen::Vector2d(3, 4).asDiagonal() * rot.transpose());
  EXPECT_NEAR(pi_p_upper(rotated, 2.0), 7.0, 1e-12);
  EXPECT_NEAR(hs_norm(rotated), 5.0, 1e-12);
  EXPECT_THROW(pi_p_upper(FiniteRankOperator(rot, NormTag::l1, NormTag::l2), 1.0), ConfigError);
}

TEST(PiPLower, SingleVectorFamily) {
  const FiniteRankOperator u = diagonal_operator(Eigen::Vector3d(-2.5, 1, 1));
  for (double p : {1.0, 1.5, 2.0})
    EXPECT_NEAR(detail::family_ratio(u, Eigen::Vector3d::Unit(0), p, {}, nullptr), 2.5, 1e-12);
}

TEST(PiPLower, IdentityOnTheLine) {
  const FiniteRankOperator id(Eigen::MatrixXd::Identity(1, 1));
  for (double p : {1.0, 1.25, 1.5, 2.0}) {
    EXPECT_NEAR(pi_p_lower(id, p).value, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(pi_p_upper(id, p), 1.0);
  }
}

TEST(PiPLower, EqualsHilbertSchmidtAtTwo) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const FiniteRankOperator op(random_matrix(1 + trial % 6, 1 + (trial * 7) % 5, rng));
    EXPECT_NEAR(pi_p_lower(op, 2.0).value, hs_norm(op), 1e-12 * hs_norm(op));
    const auto b = pi_p_bounds(op, 2.0);
    EXPECT_EQ(b.lower, b.upper);
  }
}

TEST(PiPLower, RejectsDegenerateFamily) {
  EXPECT_THROW(detail::family_ratio(diagonal_operator(Eigen::Vector2d(1, 1)), Eigen::MatrixXd::Zero(2, 3), 1.0, {},
                                    nullptr),
               ConfigError);
}

TEST(OperatorNorm, MatchesBruteForce) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXd a = random_matrix(1 + trial % 5, 1 + (trial / 5) % 6, rng);
    for (auto [dom, cod] : {std::pair{NormTag::l1, NormTag::l2}, std::pair{NormTag::l1, NormTag::l1},
                            std::pair{NormTag::linf, NormTag::l2}, std::pair{NormTag::linf, NormTag::l1},
                            std::pair{NormTag::l2, NormTag::l1}}) {
      const auto on = operator_norm(FiniteRankOperator(a, dom, cod));
      EXPECT_TRUE(on.exact);
      EXPECT_NEAR(on.value, brute_operator_norm(a, dom, cod), 1e-12 * (1 + on.value));
      EXPECT_NEAR(norm(a * on.maximizer, cod), on.value, 1e-12 * (1 + on.value));
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    EXPECT_NEAR(operator_norm(FiniteRankOperator(a)).value, svd.singularValues()(0), 1e-12);
  }
}

TEST(OperatorNorm, AscentIsARealizedLowerBound) {
  std::mt19937_64 rng(22);
  const Eigen::MatrixXd a = random_matrix(20, 20, rng);
  const auto on = operator_norm(FiniteRankOperator(a, NormTag::linf, NormTag::l2));
  EXPECT_FALSE(on.exact);
  EXPECT_NEAR(norm(a * on.maximizer, NormTag::l2), on.value, 1e-12 * on.value);
  EXPECT_NEAR(on.maximizer.lpNorm<Eigen::Infinity>(), 1.0, 1e-15);
}

// operator_norm ≤ π_p lower ≤ π_p upper.
TEST(PiPBounds, OrderedChain) {
  const auto ops = random_operators(36, 5);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (double p : {1.0, 1.5, 2.0}) {
      const double on = operator_norm(ops[i]).value;
      const auto b = pi_p_bounds(ops[i], p);
      EXPECT_LE(on, b.lower * (1 + 1e-12)) << i << " p=" << p;
      EXPECT_LE(b.lower, b.upper * (1 + 1e-12)) << i << " p=" << p;
    }
  }
}

TEST(PiPBounds, UpperSubadditiveUnderConcatenation) {
  const auto ops = random_operators(24, 6);
  for (std::size_t i = 0; i + 1 < ops.size(); ++i) {
    if (ops[i].rows() != ops[i + 1].rows() || ops[i].cols() != ops[i + 1].cols() ||
        ops[i].domain_norm() != ops[i + 1].domain_norm() || ops[i].codomain_norm() != ops[i + 1].codomain_norm())
      continue;
    const auto sum = add(ops[i], ops[i + 1]);
    EXPECT_NEAR(pi_p_upper(sum, 1.3), pi_p_upper(ops[i], 1.3) + pi_p_upper(ops[i + 1], 1.3), 1e-12);
  }
  // Same shape by construction.
  std::mt19937_64 rng(7);
  const Eigen::MatrixXd a = random_matrix(3, 4, rng), b = random_matrix(3, 4, rng);
  const FiniteRankOperator oa(a, NormTag::linf, NormTag::l1, column_decomposition(a));
  const FiniteRankOperator ob(b, NormTag::linf, NormTag::l1, column_decomposition(b));
  EXPECT_LE(pi_p_upper(add(oa, ob), 1.0), pi_p_upper(oa, 1.0) + pi_p_upper(ob, 1.0) + 1e-12);
}

TEST(PiPBounds, Homogeneous) {
  const auto ops = random_operators(12, 8);
  for (const auto& op : ops) {
    for (double alpha : {-3.0, 0.25, 2.0}) {
      const auto scaled = scale(op, alpha);
      EXPECT_NEAR(pi_p_upper(scaled, 1.5), std::abs(alpha) * pi_p_upper(op, 1.5), 1e-12 * pi_p_upper(scaled, 1.5));
      const double lo = pi_p_lower(op, 1.5).value;
      EXPECT_NEAR(pi_p_lower(scaled, 1.5).value, std::abs(alpha) * lo, 1e-9 * lo);
    }
  }
}

TEST(CompositionDecay, HeatSemigroupMatchesSeriesAndVanishes) {
  const int k = 64;
  Eigen::VectorXd inv_k(k);
  for (int i = 0; i < k; ++i) inv_k(i) = 1.0 / (i + 1);
  const auto psi = diagonal_operator(inv_k);
  const auto phi = [k](double eps) {
    Eigen::VectorXd d(k);
    for (int i = 0; i < k; ++i) d(i) = 1.0 - std::exp(-eps * (i + 1) * (i + 1) * std::numbers::pi * std::numbers::pi);
    return diagonal_operator(d);
  };
  // Oracle: the series in long double.
  const auto oracle = [k](double eps) {
    long double s = 0;
    for (int i = 1; i <= k; ++i) {
      const long double d = 1.0L - std::exp(-static_cast<long double>(eps) * i * i * std::numbers::pi_v<long double> *
                                            std::numbers::pi_v<long double>);
      s += d * d / (static_cast<long double>(i) * i);
    }
    return static_cast<double>(std::sqrt(s));
  };
  const std::vector<double> eps{1, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  const auto t = composition_decay(psi, phi, 2.0, eps, oracle);
  for (const auto& row : t.rows) {
    EXPECT_NEAR(row.upper, row.oracle, 1e-10) << row.param;
    EXPECT_NEAR(heat_decay_series(row.param, k), row.oracle, 1e-10);
    EXPECT_EQ(row.lower, row.upper);
  }
  EXPECT_TRUE(t.monotone);
  EXPECT_TRUE(t.converged);
  EXPECT_LT(t.rows.back().upper, 1e-3 * t.rows.front().upper);
}

TEST(CompositionDecay, ZeroContraction) {
  const auto psi = diagonal_operator(Eigen::Vector3d(1, 2, 3));
  const auto t = composition_decay(psi, [](double) { return FiniteRankOperator(Eigen::MatrixXd::Zero(3, 3)); }, 1.0,
                                   {1.0, 0.5});
  for (const auto& row : t.rows) EXPECT_EQ(row.upper, 0.0);
  EXPECT_TRUE(t.converged);
}

TEST(CompositionDecay, L1ToL2CounterexampleNeverConverges) {
  const auto t = l1_l2_counterexample(64);
  ASSERT_EQ(t.rows.size(), 64u);
  for (const auto& row : t.rows) {
    EXPECT_EQ(row.upper, 1.0) << row.param;
    EXPECT_EQ(row.lower, 1.0) << row.param;
  }
  EXPECT_TRUE(t.monotone);
  EXPECT_FALSE(t.converged);
}

TEST(CompositionDecay, DimensionMismatch) {
  EXPECT_THROW(composition_decay(diagonal_operator(Eigen::Vector3d(1, 1, 1)),
                                 [](double) { return diagonal_operator(Eigen::Vector2d(1, 1)); }, 2.0, {1.0}),
               ConfigError);
}

namespace {

levy::CylLevySpec cp_modes(std::vector<double> jump_sizes) {
  std::vector<levy::OneDimLevySpec> modes;
  for (double a : jump_sizes) modes.push_back(levy::CompoundPoisson{1.5, levy::TwoPoint{a}});
  return levy::make_diagonal(std::move(modes));
}

}  // namespace

TEST(SchwartzBound, ZeroOperator) {
  const auto v = schwartz_bound_check(FiniteRankOperator(Eigen::MatrixXd::Zero(2, 3)), cp_modes({1, 1, 1}), 0.5, 1.5,
                                      {1, 1000, 1});
  EXPECT_EQ(v.estimate.value, 0.0);
  EXPECT_TRUE(v.pass);
}

TEST(SchwartzBound, DiagonalOperatorMatchesVarianceSum) {
  std::vector<double> sizes;
  for (int k = 1; k <= 8; ++k) sizes.push_back(1.0 / std::sqrt(static_cast<double>(k)));
  const auto spec = cp_modes(sizes);
  Eigen::VectorXd d(8);
  double closed = 0.0;
  const double dt = 0.4;
  for (int k = 0; k < 8; ++k) {
    d(k) = 1.0 / (k + 1);
    closed += 1.5 * sizes[k] * sizes[k] * dt * d(k) * d(k);  // σ_k² dt / k²
  }
  const auto v = schwartz_bound_check(diagonal_operator(d), spec, dt, 2.0, {9, 100'000, 1});
  EXPECT_TRUE(v.pass);
  EXPECT_LT(v.ratio(), 1.0);
  // E‖ψΔL‖² itself, before the root.
  const double second = v.estimate.value * v.estimate.value;
  const double second_se = 2.0 * v.estimate.value * v.estimate.standard_error;
  EXPECT_NEAR(second, closed, 3.0 * second_se);
}

TEST(SchwartzBound, RankOneReducesToSingleMode) {
  const auto spec = cp_modes({0.8, 1.0, 1.2});
  const Eigen::Vector2d y(3, 4);
  const auto psi = rank_one(Eigen::Vector3d::Unit(0), y);
  for (double p : {1.0, 1.5, 2.0}) {
    const auto v = schwartz_bound_check(psi, spec, 1.0, p, {10, 100'000, 1});
    const double single = std::pow(*levy::abs_moment_exact(levy::CompoundPoisson{1.5, levy::TwoPoint{0.8}}, 1.0, p),
                                   1.0 / p);
    EXPECT_NEAR(v.estimate.value, 5.0 * single, 3.0 * v.estimate.standard_error) << p;
    EXPECT_TRUE(v.pass) << p;
  }
}

TEST(SchwartzBound, NonHilbertTags) {
  const auto spec = cp_modes({1.0, 0.5, 0.25, 0.125});
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd a = random_matrix(3, 4, rng);
  for (auto [dom, cod] : {std::pair{NormTag::l1, NormTag::l2}, std::pair{NormTag::linf, NormTag::l1}}) {
    const FiniteRankOperator op(a, dom, cod, column_decomposition(a));
    const auto v = schwartz_bound_check(op, spec, 0.7, 1.5, {11, 20'000, 1});
    EXPECT_TRUE(v.pass);
  }
}

TEST(SchwartzBound, RejectsFailingCondition) {
  const auto spec = levy::make_diagonal({levy::BrownianMotion{1.0}, levy::SymmetricAlphaStable{1.5, 1.0}});
  EXPECT_THROW(schwartz_bound_check(FiniteRankOperator(Eigen::MatrixXd::Identity(2, 2)), spec, 1.0, 1.2, {1, 100, 1}),
               AssumptionError);
}
