#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "cylevy/integral/simple.hpp"

namespace cylevy::integral {

/// Deterministic operator-valued process t ↦ Ψ(t).
using OperatorProcess = std::function<FiniteRankOperator(double)>;

/// Rounds every entry to a multiple of 2·pitch/(rows·cols). The entrywise
/// error sums to at most `pitch`, which bounds π_p of the error.
inline FiniteRankOperator quantize(const FiniteRankOperator& op, double pitch) {
  if (pitch <= 0.0) return op;
  const double step = 2.0 * pitch / static_cast<double>(op.rows() * op.cols());
  const Eigen::MatrixXd q = (op.matrix() / step).array().round().matrix() * step;
  const bool needs_terms = !op.hilbert() && !FiniteRankOperator(q).is_diagonal();
  if (needs_terms) return FiniteRankOperator(q, op.domain_norm(), op.codomain_norm(), ps::column_decomposition(q));
  return FiniteRankOperator(q, op.domain_norm(), op.codomain_norm());
}

/// Left-endpoint simple approximation Ψ_k = quantize(Ψ(t_k)) on (t_k, t_{k+1}].
inline SimpleIntegrand approximate_by_simple(const OperatorProcess& process, const std::vector<double>& partition,
                                             double pitch = 0.0) {
  std::vector<FiniteRankOperator> ops;
  for (std::size_t k = 0; k + 1 < partition.size(); ++k) ops.push_back(quantize(process(partition[k]), pitch));
  return deterministic_integrand(partition, ops);
}

/// (∫_0^T π_p(Ψ(s) − Ψ_simple(s))^p ds)^{1/p}, by 20-point Gauss–Legendre on
/// each interval of the simple integrand.
inline double lambda_distance(const OperatorProcess& process, const SimpleIntegrand& simple, double p) {
  simple.validate();
  double total = 0.0;
  for (std::size_t k = 0; k < simple.pieces.size(); ++k) {
    const Eigen::MatrixXd& value = simple.pieces[k].operators[0].matrix();
    const auto f = [&](double s) {
      const FiniteRankOperator psi = process(s);
      return std::pow(ps::pi_p_upper_matrix(psi.matrix() - value, psi.domain_norm(), psi.codomain_norm(), p), p);
    };
    total += boost::math::quadrature::gauss<double, 20>::integrate(f, simple.partition[k], simple.partition[k + 1]);
  }
  return std::pow(total, 1.0 / p);
}

inline std::vector<double> uniform_partition(double horizon, std::size_t intervals) {
  std::vector<double> t(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) t[i] = horizon * static_cast<double>(i) / static_cast<double>(intervals);
  t.back() = horizon;
  return t;
}

struct RefinementRow {
  double mesh = 0.0;
  double distance = 0.0;
};

/// Λ-distance along dyadic refinements with 1, 2, 4, …, 2^{levels−1} intervals.
inline std::vector<RefinementRow> refinement_study(const OperatorProcess& process, double horizon, int levels, double p,
                                                   double pitch = 0.0) {
  std::vector<RefinementRow> rows;
  for (int l = 0; l < levels; ++l) {
    const std::size_t n = std::size_t{1} << l;
    const auto simple = approximate_by_simple(process, uniform_partition(horizon, n), pitch);
    rows.push_back({horizon / static_cast<double>(n), lambda_distance(process, simple, p)});
  }
  return rows;
}

}  // namespace cylevy::integral
