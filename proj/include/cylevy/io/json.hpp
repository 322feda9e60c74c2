#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "cylevy/levy/spec.hpp"
#include "cylevy/psumming/operator.hpp"
#include "cylevy/spde/demo.hpp"

namespace cylevy::io {

using json = nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return j.at(key);
}

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return require(j, key, where).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": field '" + key + "' has the wrong type (" + e.what() + ")");
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get<T>(j, key, where);
}

/// A number applied to every mode, or an explicit list of length k.
inline Eigen::VectorXd vector_field(const json& j, const char* key, std::size_t k, const std::string& where) {
  const json& v = require(j, key, where);
  Eigen::VectorXd out(static_cast<Eigen::Index>(k));
  if (v.is_number()) {
    out.setConstant(v.get<double>());
  } else if (v.is_array()) {
    if (v.size() != k) throw ConfigError(where + ": field '" + key + "' must have " + std::to_string(k) + " entries");
    for (std::size_t i = 0; i < k; ++i) out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  } else {
    throw ConfigError(where + ": field '" + key + "' must be a number or an array");
  }
  return out;
}

}  // namespace detail

inline levy::JumpLaw parse_jump_law(const json& j) {
  const std::string w = "jumps";
  const auto law = detail::get<std::string>(j, "law", w);
  if (law == "two_point") return levy::TwoPoint{detail::get<double>(j, "a", w)};
  if (law == "gaussian") return levy::GaussianJump{detail::get<double>(j, "sigma", w)};
  if (law == "laplace") return levy::SymmetricExponentialJump{detail::get<double>(j, "theta", w)};
  throw ConfigError("jumps: unknown law '" + law + "'");
}

inline levy::OneDimLevySpec parse_levy(const json& j) {
  const std::string w = "mode";
  const auto family = detail::get<std::string>(j, "family", w);
  if (family == "brownian") return levy::BrownianMotion{detail::get_or(j, "sigma", 1.0, w)};
  if (family == "compound_poisson")
    return levy::CompoundPoisson{detail::get_or(j, "rate", 1.0, w), parse_jump_law(detail::require(j, "jumps", w))};
  if (family == "stable")
    return levy::SymmetricAlphaStable{detail::get<double>(j, "alpha", w), detail::get_or(j, "scale", 1.0, w)};
  if (family == "drifted_compound_poisson")
    return levy::DriftedCompoundPoisson{detail::get<double>(j, "drift", w), detail::get_or(j, "rate", 1.0, w),
                                        parse_jump_law(detail::require(j, "jumps", w))};
  throw ConfigError("mode: unknown family '" + family + "'");
}

/// The same process with every jump (and drift and Gaussian part) scaled by f.
inline levy::OneDimLevySpec scaled(const levy::OneDimLevySpec& spec, double f) {
  const auto scale_jump = [f](const levy::JumpLaw& law) -> levy::JumpLaw {
    return std::visit(levy::overloaded{
                          [f](const levy::TwoPoint& t) -> levy::JumpLaw { return levy::TwoPoint{t.a * f}; },
                          [f](const levy::GaussianJump& g) -> levy::JumpLaw { return levy::GaussianJump{g.sigma * f}; },
                          [f](const levy::SymmetricExponentialJump& e) -> levy::JumpLaw {
                            return levy::SymmetricExponentialJump{e.theta / f};
                          },
                      },
                      law);
  };
  return std::visit(levy::overloaded{
                        [&](const levy::BrownianMotion& b) -> levy::OneDimLevySpec { return levy::BrownianMotion{b.sigma * f}; },
                        [&](const levy::CompoundPoisson& c) -> levy::OneDimLevySpec {
                          return levy::CompoundPoisson{c.rate, scale_jump(c.jumps)};
                        },
                        [&](const levy::SymmetricAlphaStable& s) -> levy::OneDimLevySpec {
                          return levy::SymmetricAlphaStable{s.alpha, s.scale * f};
                        },
                        [&](const levy::DriftedCompoundPoisson& d) -> levy::OneDimLevySpec {
                          return levy::DriftedCompoundPoisson{d.drift * f, d.rate, scale_jump(d.jumps)};
                        },
                    },
                    spec);
}

/// Noise specification:
///   {"kind": "diagonal", "modes": [mode, ...]}
///   {"kind": "diagonal", "mode": mode, "count": K, "size_power": γ}   mode k scaled by k^{-γ}
///   {"kind": "compound_poisson", "rate": r, "jumps": law, "scales": [..] | "scale_power": γ,
///    "count": K, "coupling": "independent" | "common"}
/// `count` defaults to `default_k`.
inline levy::CylLevySpec parse_noise(const json& j, std::size_t default_k = 0) {
  const std::string w = "noise";
  const auto kind = detail::get_or<std::string>(j, "kind", "diagonal", w);
  const auto k = detail::get_or<std::size_t>(j, "count", default_k, w);
  levy::CylLevySpec spec;
  if (kind == "diagonal") {
    std::vector<levy::OneDimLevySpec> modes;
    if (j.contains("modes")) {
      for (const auto& m : j.at("modes")) modes.push_back(parse_levy(m));
    } else {
      if (k == 0) throw ConfigError("noise: 'count' (or the truncation K) is required with 'mode'");
      const auto base = parse_levy(detail::require(j, "mode", w));
      const double gamma = detail::get_or(j, "size_power", 0.0, w);
      for (std::size_t i = 1; i <= k; ++i) modes.push_back(scaled(base, std::pow(static_cast<double>(i), -gamma)));
    }
    spec = levy::make_diagonal(std::move(modes));
  } else if (kind == "compound_poisson") {
    levy::CompoundPoissonCyl c;
    c.rate = detail::get_or(j, "rate", 1.0, w);
    c.jumps = parse_jump_law(detail::require(j, "jumps", w));
    if (j.contains("scales")) {
      c.scales = detail::get<std::vector<double>>(j, "scales", w);
    } else {
      if (k == 0) throw ConfigError("noise: 'count' (or the truncation K) is required with 'scale_power'");
      const double gamma = detail::get_or(j, "scale_power", 0.0, w);
      for (std::size_t i = 1; i <= k; ++i) c.scales.push_back(std::pow(static_cast<double>(i), -gamma));
    }
    const auto coupling = detail::get_or<std::string>(j, "coupling", "independent", w);
    if (coupling != "independent" && coupling != "common") throw ConfigError("noise: unknown coupling '" + coupling + "'");
    c.coupling = coupling == "common" ? levy::JumpCoupling::common : levy::JumpCoupling::independent;
    spec.kind = c;
  } else {
    throw ConfigError("noise: unknown kind '" + kind + "'");
  }
  levy::validate(spec);
  return spec;
}

/// {"diagonal": [..]} | {"diagonal_power": γ, "count": K} | {"matrix": [[..], ..]},
/// with optional "domain"/"codomain" tags (l1, l2, linf). Non-Hilbert,
/// non-diagonal matrices get the column decomposition.
inline ps::FiniteRankOperator parse_operator(const json& j) {
  const std::string w = "operator";
  const auto domain = ps::parse_norm_tag(detail::get_or<std::string>(j, "domain", "l2", w));
  const auto codomain = ps::parse_norm_tag(detail::get_or<std::string>(j, "codomain", "l2", w));
  Eigen::MatrixXd m;
  if (j.contains("diagonal")) {
    const auto d = detail::get<std::vector<double>>(j, "diagonal", w);
    m = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Eigen::Index>(d.size())).asDiagonal();
  } else if (j.contains("diagonal_power")) {
    const auto k = detail::get<std::size_t>(j, "count", w);
    const double gamma = detail::get<double>(j, "diagonal_power", w);
    m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = std::pow(static_cast<double>(i + 1), -gamma);
  } else if (j.contains("matrix")) {
    const auto rows = detail::get<std::vector<std::vector<double>>>(j, "matrix", w);
    if (rows.empty() || rows.front().empty()) throw ConfigError("operator: empty matrix");
    m.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows.front().size()) throw ConfigError("operator: ragged matrix");
      for (std::size_t c = 0; c < rows[r].size(); ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  } else {
    throw ConfigError("operator: need 'diagonal', 'diagonal_power' or 'matrix'");
  }
  const ps::FiniteRankOperator plain(m, domain, codomain);
  if (plain.hilbert() || plain.is_diagonal()) return plain;
  return plain.with_decomposition(ps::column_decomposition(m));
}

/// SPDE problem:
///   {"semigroup": {"heat": K} | {"eigenvalues": [..]},
///    "drift": {"kind": "zero" | "sine_diag" | "linear_diag", "c": x | [..]},
///    "diffusion": {"kind": "zero" | "constant_diag" | "scalar_factor_diag", "q": x | [..],
///                  "factor": "one_plus_sin" | "sin", "scale": s},
///    "x0": {"law": "deterministic" | "gaussian" | "two_point", "loc": x | [..], "scale": x | [..],
///           "decay_power": γ},            loc_k, scale_k multiplied by k^{-γ}
///    "noise": noise, "T": 1, "p": 2}
/// {"preset": "heat_demo", "K": 32, "q": 2} and {"preset": "additive_linear", ...} are shorthands.
inline spde::MildProblem parse_problem(const json& j) {
  const std::string w = "problem";
  if (j.contains("preset")) {
    const auto preset = detail::get<std::string>(j, "preset", w);
    if (preset == "heat_demo")
      return spde::heat_demo_problem(detail::get_or<std::size_t>(j, "K", 32, w), detail::get_or(j, "q", 2.0, w));
    if (preset == "additive_linear")
      return spde::additive_linear_problem(detail::get_or(j, "lambda", 1.0, w), detail::get_or(j, "sigma", 1.0, w),
                                           detail::get_or(j, "x0", 1.0, w), detail::get_or(j, "rate", 4.0, w),
                                           detail::get_or(j, "a", 0.5, w));
    throw ConfigError("problem: unknown preset '" + preset + "'");
  }
  spde::MildProblem pr;
  const json& semi = detail::require(j, "semigroup", w);
  if (semi.contains("heat")) {
    pr.semigroup = spde::heat_semigroup(detail::get<std::size_t>(semi, "heat", "semigroup"));
  } else {
    pr.semigroup.eigenvalues = detail::get<std::vector<double>>(semi, "eigenvalues", "semigroup");
  }
  const std::size_t k = pr.semigroup.dim();

  const json drift = j.value("drift", json::object());
  const auto dkind = detail::get_or<std::string>(drift, "kind", "zero", "drift");
  if (dkind == "sine_diag" || dkind == "linear_diag") {
    pr.drift.kind = dkind == "sine_diag" ? spde::DriftKind::sine_diag : spde::DriftKind::linear_diag;
    pr.drift.c = detail::vector_field(drift, "c", k, "drift");
  } else if (dkind != "zero") {
    throw ConfigError("drift: unknown kind '" + dkind + "'");
  }

  const json diff = j.value("diffusion", json::object());
  const auto gkind = detail::get_or<std::string>(diff, "kind", "zero", "diffusion");
  if (gkind == "constant_diag" || gkind == "scalar_factor_diag") {
    pr.diffusion.kind =
        gkind == "constant_diag" ? spde::DiffusionKind::constant_diag : spde::DiffusionKind::scalar_factor_diag;
    pr.diffusion.q = detail::vector_field(diff, "q", k, "diffusion");
    const auto factor = detail::get_or<std::string>(diff, "factor", "one_plus_sin", "diffusion");
    if (factor != "one_plus_sin" && factor != "sin") throw ConfigError("diffusion: unknown factor '" + factor + "'");
    pr.diffusion.factor = factor == "sin" ? spde::FactorFormula::sin : spde::FactorFormula::one_plus_sin;
    pr.diffusion.factor_scale = detail::get_or(diff, "scale", 1.0, "diffusion");
  } else if (gkind != "zero") {
    throw ConfigError("diffusion: unknown kind '" + gkind + "'");
  }

  const json x0 = j.value("x0", json::object());
  const auto law = detail::get_or<std::string>(x0, "law", "deterministic", "x0");
  if (law == "deterministic") pr.x0.law = spde::InitialLaw::deterministic;
  else if (law == "gaussian") pr.x0.law = spde::InitialLaw::gaussian;
  else if (law == "two_point") pr.x0.law = spde::InitialLaw::two_point;
  else throw ConfigError("x0: unknown law '" + law + "'");
  pr.x0.loc = x0.contains("loc") ? detail::vector_field(x0, "loc", k, "x0") : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  pr.x0.scale = x0.contains("scale") ? detail::vector_field(x0, "scale", k, "x0") : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  const double gamma = detail::get_or(x0, "decay_power", 0.0, "x0");
  for (std::size_t i = 0; i < k; ++i) {
    const double f = std::pow(static_cast<double>(i + 1), -gamma);
    pr.x0.loc[static_cast<Eigen::Index>(i)] *= f;
    pr.x0.scale[static_cast<Eigen::Index>(i)] *= f;
  }

  pr.noise = parse_noise(detail::require(j, "noise", w), k);
  pr.horizon = detail::get_or(j, "T", 1.0, w);
  pr.p = detail::get_or(j, "p", 2.0, w);
  spde::validate(pr);
  return pr;
}

}  // namespace cylevy::io
