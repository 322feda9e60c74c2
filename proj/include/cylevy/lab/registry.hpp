#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "cylevy/errors.hpp"

namespace cylevy::lab {

struct ExperimentInfo {
  std::string id;
  std::string anchor;        ///< the inequality or statement the experiment exercises
  std::string runtime;       ///< "seconds" or "minutes" at default size
  std::size_t default_paths;
  std::string summary;
};

inline const std::vector<ExperimentInfo>& list_experiments() {
  static const std::vector<ExperimentInfo> registry{
      {"schwartz-bound", "‖u(μ)‖_p ≤ π_p(u)‖μ‖_p*", "minutes", 20000,
       "randomized operator/noise suite for the p-summing radonification bound"},
      {"radonify-bound", "‖J_{s,t}‖_{L(S,L^p)} ≤ ‖L(t−s)‖_{L(E^*,L^p(Ω;R))}", "minutes", 20000,
       "randomized simple random operators against the increment weak norm"},
      {"integral-continuity", "E[‖I_B(Ψ)‖^p] ≤ T^{p/q}‖B(1)‖^p_{L(E^*,R)} E[∫₀^T π_p(Ψ(s))^p ds]", "minutes", 20000,
       "continuity of the integral operator on random simple integrands"},
      {"gaussian-counterexample", "(1/n)^{p/2} 2^{p/2}Γ((p+1)/2)/√π", "seconds", 100000,
       "blow-up rate of E|W(1/n)|^p / E∫|Ψ_n|^p"},
      {"stable-counterexample", "E|L(1/n)|^p = n^{−p/α}E|L(1)|^p", "seconds", 100000,
       "blow-up rate for symmetric stable noise"},
      {"composition-decay", "π_p(φ_nψ) → 0", "seconds", 0,
       "π₂((Id − S(ε))·diag(1/k)) for the heat semigroup"},
      {"grothendieck", "π_1(φ_nψ)=‖e_n‖‖e_n‖=1", "seconds", 0,
       "identity ℓ¹ → ℓ² composed with e_n ⊗ e_n does not decay"},
      {"condition-check", "Σ_{k=1}^∞ (∫_R |β|^p ρ_k(dβ))^{2/(2−p)} < ∞", "seconds", 0,
       "weak p-integrability verdicts for diagonal noise"},
      {"picard-demo", "Banach's fixed point theorem", "minutes", 2000,
       "Picard iteration for the heat equation with compound Poisson noise"},
      {"convolution-isometry", "K₂(X)(t) := ∫₀^t S(t−s)G(X(s)) dL(s)", "seconds", 20000,
       "second moment of the stochastic convolution with constant G"},
  };
  return registry;
}

inline const ExperimentInfo& find_experiment(const std::string& id) {
  const auto& r = list_experiments();
  const auto it = std::find_if(r.begin(), r.end(), [&](const ExperimentInfo& e) { return e.id == id; });
  if (it == r.end()) throw ConfigError("unknown experiment id '" + id + "'");
  return *it;
}

}  // namespace cylevy::lab
