#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "cylevy/errors.hpp"

namespace cylevy::mc {

/// Streaming mean/variance (Welford) with Chan's pairwise merge.
class MomentAccumulator {
 public:
  void add(double x) {
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }

  void merge(const MomentAccumulator& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double delta = other.mean_ - mean_;
    const double total = na + nb;
    mean_ += delta * nb / total;
    m2_ += other.m2_ + delta * delta * na * nb / total;
    n_ += other.n_;
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double sample_variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
  double standard_error() const {
    return n_ > 1 ? std::sqrt(sample_variance() / static_cast<double>(n_)) : 0.0;
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Monte Carlo estimate of E|X|^p (or E‖X‖^p) with its standard error.
struct MomentEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::size_t n_samples = 0;
  double p = 1.0;

  /// (E|X|^p)^{1/p} with a delta-method standard error.
  MomentEstimate root() const {
    MomentEstimate r = *this;
    r.value = std::pow(value, 1.0 / p);
    r.standard_error = value > 0.0 ? r.value * standard_error / (p * value) : 0.0;
    return r;
  }
};

inline MomentEstimate to_estimate(const MomentAccumulator& acc, double p) {
  return {acc.mean(), acc.standard_error(), acc.count(), p};
}

/// Mean of |x|^p over scalar samples; SE = sample std / sqrt(n).
inline MomentEstimate estimate_p_moment(std::span<const double> samples, double p) {
  if (samples.empty()) throw ConfigError("estimate_p_moment: empty sample");
  if (!(p > 0.0)) throw ConfigError("estimate_p_moment: p must be positive");
  MomentAccumulator acc;
  for (double x : samples) acc.add(std::pow(std::abs(x), p));
  return to_estimate(acc, p);
}

/// Mean of ‖x‖_2^p over vector samples.
inline MomentEstimate estimate_p_moment(std::span<const Eigen::VectorXd> samples, double p) {
  if (samples.empty()) throw ConfigError("estimate_p_moment: empty sample");
  if (!(p > 0.0)) throw ConfigError("estimate_p_moment: p must be positive");
  MomentAccumulator acc;
  for (const auto& x : samples) acc.add(std::pow(x.norm(), p));
  return to_estimate(acc, p);
}

/// Outcome of comparing an estimate against an upper bound with the slack
/// policy "estimate <= bound + 3 SE".
struct BoundVerdict {
  MomentEstimate estimate;
  double bound = 0.0;
  /// SE of the bound when the bound is itself estimated; combined in
  /// quadrature with the estimate's SE.
  double bound_standard_error = 0.0;
  bool pass = false;

  double slack_se() const {
    return std::hypot(estimate.standard_error, bound_standard_error);
  }
  double ratio() const { return bound > 0.0 ? estimate.value / bound : (estimate.value > 0.0 ? INFINITY : 0.0); }
};

inline constexpr double kSlackSigmas = 3.0;

/// Two-sided z threshold for m simultaneous comparisons whose family-wise
/// error equals that of a single `base`-sigma test (Bonferroni).
inline double family_sigmas(std::size_t m, double base = mc::kSlackSigmas) {
  const boost::math::normal_distribution<double> n;
  const double alpha = 2.0 * boost::math::cdf(boost::math::complement(n, base));
  return boost::math::quantile(boost::math::complement(n, alpha / (2.0 * static_cast<double>(std::max<std::size_t>(m, 1)))));
}

inline BoundVerdict make_verdict(const MomentEstimate& estimate, double bound,
                                 double bound_se = 0.0) {
  BoundVerdict v{estimate, bound, bound_se, false};
  v.pass = estimate.value <= bound + kSlackSigmas * v.slack_se();
  return v;
}

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;
};

/// Least squares fit of log(value) = intercept + slope * log(n).
inline LogLogFit fit_loglog_slope(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 3) throw ConfigError("fit_loglog_slope: need at least 3 points");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!(pairs[i].first > 0.0) || !(pairs[i].second > 0.0))
      throw ConfigError("fit_loglog_slope: abscissae and values must be positive");
    if (i > 0 && !(pairs[i].first > pairs[i - 1].first))
      throw ConfigError("fit_loglog_slope: abscissae must be strictly increasing");
  }
  const auto m = static_cast<double>(pairs.size());
  double sx = 0, sy = 0;
  for (auto [n, v] : pairs) {
    sx += std::log(n);
    sy += std::log(v);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (auto [n, v] : pairs) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (auto [n, v] : pairs)
    fit.max_residual =
        std::max(fit.max_residual, std::abs(std::log(v) - fit.intercept - fit.slope * std::log(n)));
  return fit;
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Asymptotic Kolmogorov survival function Q(λ) = 2 Σ (-1)^{j-1} exp(-2 j² λ²).
inline double kolmogorov_survival(double lambda) {
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += (j % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Two-sample Kolmogorov–Smirnov test (Stephens' small-sample correction).
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ConfigError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace cylevy::mc
