#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cylevy/errors.hpp"

namespace cylevy::integral {

/// Simulated noise path recorded on a growing grid 0 = τ_0 < τ_1 < …,
/// storing L(τ_i).
class History {
 public:
  explicit History(Eigen::Index dim) : times_{0.0}, values_{Eigen::VectorXd::Zero(dim)} {}

  void append(double t, const Eigen::VectorXd& increment) {
    if (!(t > times_.back())) throw ConfigError("History::append: times must increase");
    if (increment.size() != values_.back().size()) throw ConfigError("History::append: dimension mismatch");
    times_.push_back(t);
    values_.push_back(values_.back() + increment);
  }

  double last_time() const { return times_.back(); }
  Eigen::Index dim() const { return values_.back().size(); }
  const std::vector<double>& times() const { return times_; }

  /// L at the largest recorded time ≤ t.
  const Eigen::VectorXd& value_at(double t) const {
    std::size_t i = times_.size() - 1;
    while (i > 0 && times_[i] > t) --i;
    return values_[i];
  }

 private:
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> values_;
};

/// Read access to a History for a decision rule anchored at s. Any read at
/// a time after s throws MeasurabilityError.
class HistoryView {
 public:
  HistoryView(const History& h, double anchor) : history_(h), anchor_(anchor) {}

  double anchor() const { return anchor_; }

  const Eigen::VectorXd& at(double t) const {
    if (t > anchor_) {
      throw MeasurabilityError("decision rule read history at t = " + std::to_string(t) + " beyond its anchor s = " +
                               std::to_string(anchor_));
    }
    return history_.value_at(t);
  }

  /// L(s).
  const Eigen::VectorXd& current() const { return at(anchor_); }

  /// Recorded grid times up to the anchor.
  std::vector<double> times() const {
    std::vector<double> out;
    for (double t : history_.times())
      if (t <= anchor_) out.push_back(t);
    return out;
  }

 private:
  const History& history_;
  double anchor_;
};

/// Maps the history up to the anchor to an operator index in {0, …, m-1}.
using DecisionRule = std::function<std::size_t(const HistoryView&)>;

inline DecisionRule constant_rule(std::size_t index = 0) {
  return [index](const HistoryView&) { return index; };
}

/// Parity of the number of strictly positive coordinates of L(s).
inline DecisionRule parity_rule() {
  return [](const HistoryView& v) {
    const Eigen::VectorXd& x = v.current();
    return static_cast<std::size_t>((x.array() > 0.0).count() % 2);
  };
}

/// 1 if ‖L(s)‖₂ > threshold, else 0.
inline DecisionRule threshold_rule(double threshold) {
  return [threshold](const HistoryView& v) { return v.current().norm() > threshold ? std::size_t{1} : std::size_t{0}; };
}

}  // namespace cylevy::integral
