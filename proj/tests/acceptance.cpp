// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Oracles are computed here from closed forms and an
// independent simulator, not taken from the library.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cylevy/lab/run.hpp"

using namespace cylevy;

namespace {

constexpr std::uint64_t kSeedBase = 20261019;
constexpr double kSigmas = 3.0;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail += (detail.empty() ? "" : "; ") + std::string(ok ? "" : "FAILED ") + what;
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Slope of log(E|L(1/n)|^p · n) against log n, fitted here.
double fitted_slope(const integral::SlopeReport& rep) {
  std::vector<double> x, y;
  for (const auto& row : rep.rows) {
    x.push_back(std::log(row.n));
    y.push_back(std::log(row.lhs.value * row.n));
  }
  return ols_slope(x, y);
}

std::vector<double> dyadic_1024() {
  std::vector<double> n;
  for (int j = 0; j <= 10; ++j) n.push_back(std::ldexp(1.0, j));
  return n;
}

// 1 ---------------------------------------------------------------------------

Outcome gaussian_rate() {
  Outcome o;
  const auto ns = dyadic_1024();
  const double sigmas = mc::family_sigmas(ns.size(), kSigmas);
  for (double p : {1.0, 1.5}) {
    const auto rep = integral::gaussian_counterexample(p, ns, {kSeedBase + 1 + static_cast<std::uint64_t>(p * 10), 100000, 1});
    const double slope = fitted_slope(rep);
    o.require(std::abs(slope - (1.0 - p / 2.0)) <= 0.05,
              "p=" + num(p) + " slope " + num(slope) + " vs " + num(1.0 - p / 2.0));
    double worst = 0.0;
    for (const auto& row : rep.rows) {
      const double exact = std::pow(1.0 / row.n, p / 2.0) * std::pow(2.0, p / 2.0) * std::tgamma((p + 1.0) / 2.0) /
                           std::sqrt(std::numbers::pi);
      worst = std::max(worst, std::abs(row.lhs.value - exact) / row.lhs.standard_error);
    }
    o.require(worst <= sigmas, "p=" + num(p) + " Gamma-formula max z " + num(worst) + " <= " + num(sigmas));
  }
  return o;
}

// 2 ---------------------------------------------------------------------------

Outcome stable_rate() {
  Outcome o;
  const auto ns = dyadic_1024();
  const double sigmas = mc::family_sigmas(ns.size() - 1, kSigmas);
  for (auto [alpha, p] : {std::pair{1.5, 1.0}, std::pair{1.9, 1.0}}) {
    const auto rep = integral::stable_counterexample(alpha, p, ns, {kSeedBase + 2 + static_cast<std::uint64_t>(alpha * 10), 100000, 1});
    const double slope = fitted_slope(rep);
    const double expected = (alpha - p) / alpha;
    o.require(std::abs(slope - expected) <= 0.05,
              "alpha=" + num(alpha) + " slope " + num(slope) + " vs " + num(expected));
    const auto& unit = rep.rows.front().lhs;
    double worst = 0.0;
    for (std::size_t j = 1; j < rep.rows.size(); ++j) {
      const auto& row = rep.rows[j];
      const double scale = std::pow(row.n, -p / alpha);
      const double se = std::hypot(row.lhs.standard_error, scale * unit.standard_error);
      worst = std::max(worst, std::abs(row.lhs.value - scale * unit.value) / se);
    }
    o.require(worst <= sigmas, "alpha=" + num(alpha) + " self-similarity max z " + num(worst) + " <= " + num(sigmas));
  }
  return o;
}

// 3 ---------------------------------------------------------------------------

double jump_second_moment(const levy::JumpLaw& law) {
  return std::visit(levy::overloaded{
                        [](const levy::TwoPoint& t) { return t.a * t.a; },
                        [](const levy::GaussianJump& g) { return g.sigma * g.sigma; },
                        [](const levy::SymmetricExponentialJump& e) { return 2.0 / (e.theta * e.theta); },
                    },
                    law);
}

// E[ΔL ΔLᵀ] over a step dt, from the family definitions.
Eigen::MatrixXd increment_second_moment(const levy::CylLevySpec& spec, double dt) {
  const auto k = static_cast<Eigen::Index>(spec.truncation());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
  if (const auto* c = std::get_if<levy::CompoundPoissonCyl>(&spec.kind)) {
    const double e2 = c->rate * dt * jump_second_moment(c->jumps);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        if (i == j || c->coupling == levy::JumpCoupling::common) m(i, j) = e2 * c->scales[i] * c->scales[j];
    return m;
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& mode = spec.diagonal().modes[static_cast<std::size_t>(i)];
    if (const auto* b = std::get_if<levy::BrownianMotion>(&mode)) m(i, i) = b->sigma * b->sigma * dt;
    if (const auto* c = std::get_if<levy::CompoundPoisson>(&mode)) m(i, i) = c->rate * dt * jump_second_moment(c->jumps);
    if (const auto* d = std::get_if<levy::DriftedCompoundPoisson>(&mode)) {
      mean[i] = d->drift * dt;
      m(i, i) = d->rate * dt * jump_second_moment(d->jumps);
    }
  }
  return m + mean * mean.transpose();
}

Outcome radonification_bounds() {
  Outcome o;
  const std::size_t n_configs = 50, n_paths = 20000;
  std::size_t schwartz = 0, radon = 0, closed = 0, closed_ok = 0;
  const double ps[] = {1.0, 1.5, 2.0};
  for (std::size_t i = 0; i < n_configs; ++i) {
    mc::RngStream g(kSeedBase + 3, (std::uint64_t{1} << 40) + i);
    const double p = ps[i % 3];
    const std::size_t k = 2 + lab::detail::pick(g, 7);
    const auto rows = static_cast<Eigen::Index>(1 + lab::detail::pick(g, k + 1));
    const auto noise = lab::detail::random_noise(k, true, true, g);
    const auto dom = lab::detail::random_tag(g, true, true);
    const auto cod = lab::detail::random_tag(g, true, false);
    const auto psi = lab::detail::random_operator(rows, static_cast<Eigen::Index>(k), dom, cod, g);
    const double dt = lab::detail::uniform(g, 0.05, 1.0);
    if (!levy::check_condition(noise.spec, p).pass) {
      o.require(false, "config " + std::to_string(i) + " fails the condition checker");
      continue;
    }
    const mc::McConfig mc{kSeedBase + 300 + i, n_paths, 1};
    schwartz += ps::schwartz_bound_check(psi, noise.spec, dt, p, mc).pass;

    integral::SimpleOperatorRV rv;
    std::string rule;
    rv.rule = lab::detail::random_rule(g, rule);
    rv.operators.push_back(psi);
    if (rule != "constant")
      rv.operators.push_back(lab::detail::random_operator(rows, static_cast<Eigen::Index>(k), dom, cod, g));
    const double s = lab::detail::uniform(g, 0.0, 0.5);
    integral::BoundCheckConfig cfg;
    cfg.mc = {kSeedBase + 3000 + i, n_paths, 1};
    radon += integral::verify_radonification_bound(rv, noise.spec, s, s + dt, p, cfg).pass;
  }
  o.require(schwartz == n_configs, "Schwartz bound " + std::to_string(schwartz) + "/" + std::to_string(n_configs));
  o.require(radon == n_configs, "random-operator bound " + std::to_string(radon) + "/" + std::to_string(n_configs));

  // p = 2, l2 codomain: E‖ψΔL‖² = tr(ψ E[ΔLΔLᵀ] ψᵀ).
  for (std::size_t i = 0; i < 20; ++i) {
    mc::RngStream g(kSeedBase + 3, (std::uint64_t{1} << 41) + i);
    const std::size_t k = 2 + lab::detail::pick(g, 7);
    const auto rows = static_cast<Eigen::Index>(1 + lab::detail::pick(g, k + 1));
    const auto noise = lab::detail::random_noise(k, true, true, g);
    const auto dom = lab::detail::random_tag(g, true, true);
    const auto psi = lab::detail::random_operator(rows, static_cast<Eigen::Index>(k), dom, ps::NormTag::l2, g);
    const double dt = lab::detail::uniform(g, 0.05, 1.0);
    const auto v = ps::schwartz_bound_check(psi, noise.spec, dt, 2.0, {kSeedBase + 30000 + i, n_paths, 1});
    const Eigen::MatrixXd& a = psi.matrix();
    const double exact = (a * increment_second_moment(noise.spec, dt) * a.transpose()).trace();
    const double second = v.estimate.value * v.estimate.value;
    const double se = 2.0 * v.estimate.value * v.estimate.standard_error;
    ++closed;
    closed_ok += std::abs(second - exact) <= kSigmas * se;
  }
  o.require(closed_ok == closed, "p=2 closed form " + std::to_string(closed_ok) + "/" + std::to_string(closed));
  return o;
}

// 4 ---------------------------------------------------------------------------

Outcome integral_continuity() {
  Outcome o;
  const std::size_t n_configs = 30;
  std::size_t passed = 0;
  const double ps[] = {1.0, 1.5, 2.0};
  for (std::size_t i = 0; i < n_configs; ++i) {
    mc::RngStream g(kSeedBase + 4, (std::uint64_t{1} << 40) + i);
    const double p = ps[i % 3];
    const std::size_t k = 2 + lab::detail::pick(g, 5);
    const auto noise = lab::detail::random_noise(k, p == 2.0, true, g);
    const auto dom = lab::detail::random_tag(g, true, true);
    std::string rules;
    const auto psi = lab::detail::random_integrand(k, dom, g, rules);
    integral::ContinuityConfig cfg;
    cfg.check.mc = {kSeedBase + 400 + i, 20000, 1};
    passed += integral::verify_integral_continuity(psi, noise.spec, p, cfg).verdict.pass;
  }
  o.require(passed == n_configs, "random integrands " + std::to_string(passed) + "/" + std::to_string(n_configs));

  const Eigen::Matrix2d m0{{1.0, -2.0}, {0.5, 1.0}};
  const Eigen::Matrix2d m1{{0.0, 1.0}, {3.0, 0.0}};
  const auto psi = integral::deterministic_integrand({0.0, 0.25, 1.0}, {ps::FiniteRankOperator(m0), ps::FiniteRankOperator(m1)});

  // Drift only: I(Ψ) = Σ Δt_j m_j b is deterministic.
  const Eigen::Vector2d b(2.0, -1.0);
  const auto drift = levy::make_diagonal({levy::DriftedCompoundPoisson{b[0], 0.0, levy::TwoPoint{1.0}},
                                          levy::DriftedCompoundPoisson{b[1], 0.0, levy::TwoPoint{1.0}}});
  for (double p : ps) {
    integral::ContinuityConfig cfg;
    cfg.check.mc = {kSeedBase + 41, 8, 1};
    const auto rep = integral::verify_integral_continuity(psi, drift, p, cfg);
    const double exact = std::pow((0.25 * m0 * b + 0.75 * m1 * b).norm(), p);
    o.require(rep.lhs.value == exact && rep.lhs.standard_error == 0.0 && rep.martingale_bound == 0.0 && exact <= rep.rhs,
              "drift-only p=" + num(p) + " lhs " + num(rep.lhs.value) + " = " + num(exact) + " <= " + num(rep.rhs));
  }

  // Martingale only at p = 2: E‖I(Ψ)‖² = Σ Δt_j tr(m_j Σ m_jᵀ), bound 2·max Σ_kk·Σ Δt_j ‖m_j‖²_HS.
  const auto mart = levy::make_diagonal({levy::CompoundPoisson{2.0, levy::TwoPoint{1.0}},
                                         levy::CompoundPoisson{5.0, levy::GaussianJump{0.5}}});
  const Eigen::Vector2d var(2.0, 5.0 * 0.25);
  const Eigen::Matrix2d sigma = var.asDiagonal();
  const double exact = 0.25 * (m0 * sigma * m0.transpose()).trace() + 0.75 * (m1 * sigma * m1.transpose()).trace();
  const double rhs = 2.0 * var.maxCoeff() * (0.25 * m0.squaredNorm() + 0.75 * m1.squaredNorm());
  integral::ContinuityConfig cfg;
  cfg.check.mc = {kSeedBase + 42, 40000, 1};
  const auto rep = integral::verify_integral_continuity(psi, mart, 2.0, cfg);
  o.require(rep.drift_bound == 0.0 && std::abs(rep.rhs - rhs) <= 1e-12 * rhs && exact <= rhs,
            "martingale-only bound " + num(rep.rhs) + " = " + num(rhs) + " >= " + num(exact));
  o.require(std::abs(rep.lhs.value - exact) <= kSigmas * rep.lhs.standard_error,
            "martingale-only MC " + num(rep.lhs.value) + " vs " + num(exact));
  return o;
}

// 5 ---------------------------------------------------------------------------

Outcome decay() {
  Outcome o;
  const int k = 64;
  Eigen::VectorXd inv_k(k);
  for (int i = 0; i < k; ++i) inv_k[i] = 1.0 / (i + 1);
  const auto series = [&](double eps) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) {
      const double f = 1.0 - std::exp(-eps * j * j * std::numbers::pi * std::numbers::pi);
      s += f * f / (static_cast<double>(j) * j);
    }
    return std::sqrt(s);
  };
  const auto semi = spde::heat_semigroup(k);
  double worst = 0.0, first = 0.0, last = 0.0;
  for (int j = 0; j <= 24; ++j) {
    const double eps = std::ldexp(1.0, -j);
    const auto phi = ps::diagonal_operator(Eigen::VectorXd::Ones(k) - semi.decay(eps));
    const double v = ps::pi_p_certified_upper(ps::compose(phi, ps::diagonal_operator(inv_k)), 2.0);
    worst = std::max(worst, std::abs(v - series(eps)));
    if (j == 0) first = v;
    last = v;
  }
  o.require(worst <= 1e-10, "series oracle max error " + num(worst));
  o.require(last < 1e-3 * first, "eps=2^-24 value / eps=1 value " + num(last / first));

  const auto table = ps::l1_l2_counterexample(64);
  bool exact_one = table.rows.size() == 64;
  for (const auto& row : table.rows) exact_one = exact_one && row.upper == 1.0 && row.lower == 1.0;
  o.require(exact_one, "l1->l2 harness equals 1 for n <= 64");
  o.require(!table.converged, "non-convergence detected");
  return o;
}

// 6 ---------------------------------------------------------------------------

Outcome condition_grid() {
  Outcome o;
  std::size_t matched = 0, total = 0;
  for (double gamma : {0.2, 0.4, 0.6, 0.9, 1.3})
    for (double p : {1.0, 1.25, 1.5, 1.75}) {
      std::vector<levy::OneDimLevySpec> modes;
      for (int j = 1; j <= 64; ++j) modes.push_back(levy::CompoundPoisson{1.0, levy::TwoPoint{std::pow(j, -gamma)}});
      const bool expected = 2.0 * gamma * p / (2.0 - p) > 1.0;
      matched += levy::check_condition(levy::make_diagonal(modes), p).pass == expected;
      ++total;
    }
  o.require(matched == total, std::to_string(matched) + "/" + std::to_string(total) + " verdicts match");
  return o;
}

// 7 ---------------------------------------------------------------------------

// Exponential Euler for the heat demo, written against the model
// definition with its own random source.
std::vector<std::pair<double, double>> independent_euler_moments(std::size_t k, std::size_t steps, std::size_t paths,
                                                                 std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::poisson_distribution<long> poisson(1.0 / static_cast<double>(steps));
  std::bernoulli_distribution coin;
  const double dt = 1.0 / static_cast<double>(steps);
  std::vector<double> sum(steps + 1, 0.0), sum2(steps + 1, 0.0);
  std::vector<double> x(k);
  for (std::size_t path = 0; path < paths; ++path) {
    for (std::size_t j = 0; j < k; ++j) x[j] = (1.0 + 0.1 * normal(gen)) / static_cast<double>(j + 1);
    for (std::size_t i = 0;; ++i) {
      double sq = 0.0;
      for (double v : x) sq += v * v;
      sum[i] += sq;
      sum2[i] += sq * sq;
      if (i == steps) break;
      const double g = 0.5 * (1.0 + std::sin(std::sqrt(sq))) * 2.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double kk = static_cast<double>(j + 1);
        double dl = 0.0;
        for (long n = poisson(gen); n > 0; --n) dl += coin(gen) ? 1.0 / kk : -1.0 / kk;
        const double lambda = kk * kk * std::numbers::pi * std::numbers::pi;
        x[j] = std::exp(-lambda * dt) * (x[j] + 0.5 * std::sin(x[j]) * dt + g * dl);
      }
    }
  }
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(paths);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double mean = sum[i] / n;
    out.emplace_back(mean, std::sqrt(std::max(0.0, sum2[i] / n - mean * mean) / (n - 1.0)));
  }
  return out;
}

Outcome picard() {
  Outcome o;
  const std::size_t steps = 100;
  const auto pr = spde::heat_demo_problem(32, 2.0);
  const auto grid = spde::uniform_grid(1.0, steps);
  spde::PicardConfig cfg;
  cfg.mc = {kSeedBase + 7, 2000, 1};
  const auto res = spde::picard_solve(pr, grid, cfg);
  const auto& c = res.contraction;
  o.require(res.converged, "converged in " + std::to_string(res.iterations.size()) + " iterations");
  o.require(c.max_measured_ratio < 1.0 && c.max_measured_ratio <= c.constants.ratio_root + 0.1,
            "(a) ratio " + num(c.max_measured_ratio) + " vs predicted " + num(c.constants.ratio_root));

  const auto oracle = independent_euler_moments(32, steps, 4000, kSeedBase + 70);
  const double sigmas = mc::family_sigmas(grid.size(), kSigmas);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& m = res.ensemble.moments[i];
    const double se = std::hypot(m.standard_error, oracle[i].second);
    worst = std::max(worst, std::abs(m.value - oracle[i].first) / se);
  }
  o.require(worst <= sigmas, "(b) Euler oracle max z " + num(worst) + " <= " + num(sigmas));

  // dX = −λX dt + σ dℓ, ℓ compound Poisson (rate r, jumps ±a):
  // E X(t)² = e^{−2λt}x₀² + σ²ra²(1 − e^{−2λt})/(2λ).
  const double lambda = 1.0, sigma = 1.0, x0 = 1.0, rate = 4.0, a = 0.5;
  const std::size_t lin_steps = 200;
  const auto lin = spde::additive_linear_problem(lambda, sigma, x0, rate, a);
  const auto lin_grid = spde::uniform_grid(1.0, lin_steps);
  spde::PicardConfig lin_cfg;
  lin_cfg.mc = {kSeedBase + 71, 20000, 1};
  const auto lin_res = spde::picard_solve(lin, lin_grid, lin_cfg);
  const double h = 1.0 / static_cast<double>(lin_steps);
  const std::vector<std::size_t> probes{50, 100, 150, 200};
  const double lin_sigmas = mc::family_sigmas(probes.size(), kSigmas);
  bool lin_ok = true;
  double lin_worst = 0.0;
  for (std::size_t idx : probes) {
    const double t = lin_grid[idx];
    const double decay = std::exp(-2.0 * lambda * t);
    const double exact = decay * x0 * x0 + sigma * sigma * rate * a * a * (1.0 - decay) / (2.0 * lambda);
    // Left Riemann sum of an increasing integrand: error at most h·(f(t) − f(0)).
    const double grid_err = sigma * sigma * rate * a * a * h * (1.0 - decay);
    const auto& m = lin_res.ensemble.moments[idx];
    const double excess = std::max(0.0, std::abs(m.value - exact) - grid_err) / m.standard_error;
    lin_worst = std::max(lin_worst, excess);
    lin_ok = lin_ok && excess <= lin_sigmas;
  }
  o.require(lin_ok, "(c) additive linear max z beyond grid error " + num(lin_worst) + " <= " + num(lin_sigmas));

  spde::PicardConfig alt = cfg;
  alt.beta = c.constants.beta;
  alt.init = spde::PicardInit::zero;
  const auto res2 = spde::picard_solve(pr, grid, alt);
  const double gap =
      spde::weighted_norm(res.ensemble.paths, &res2.ensemble.paths, grid, c.constants.beta, 2.0).estimate.value;
  o.require(gap <= 2.0 * cfg.tol, "(d) initialization gap " + num(gap) + " <= " + num(2.0 * cfg.tol));
  return o;
}

// 8 ---------------------------------------------------------------------------

Outcome reproducibility() {
  namespace fs = std::filesystem;
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "cylevy_acceptance_repro";
  fs::remove_all(root);
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  std::size_t identical = 0, total = 0;
  for (const auto& e : lab::list_experiments()) {
    lab::json j{{"experiment", e.id}, {"seed", kSeedBase + 8}, {"workers", 2}};
    if (e.default_paths > 0) j["n_paths"] = 500;
    if (e.id == "schwartz-bound" || e.id == "radonify-bound") j["params"] = {{"configs", 10}};
    if (e.id == "integral-continuity") j["params"] = {{"configs", 6}};
    if (e.id == "picard-demo") j["params"] = {{"problem", {{"preset", "heat_demo"}, {"K", 8}}}, {"steps", 40}};
    std::string first;
    for (int run = 0; run < 2; ++run) {
      lab::Overrides ov;
      ov.out_dir = (root / (e.id + "_" + std::to_string(run))).string();
      lab::run_and_write(lab::parse_config(j, ov));
      const std::string csv = slurp(fs::path(*ov.out_dir) / "results.csv");
      if (run == 0) first = csv;
      else if (!csv.empty() && csv == first) ++identical;
    }
    ++total;
  }
  o.require(identical == total, std::to_string(identical) + "/" + std::to_string(total) + " experiments byte-identical");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_seconds;
  };
  const std::vector<Criterion> criteria{
      {"1 Gaussian counterexample rate", gaussian_rate, 120},
      {"2 stable counterexample rate", stable_rate, 120},
      {"3 Schwartz/radonification bounds", radonification_bounds, 300},
      {"4 integral continuity", integral_continuity, 300},
      {"5 composition decay and l1->l2 counterexample", decay, 0},
      {"6 condition checker grid", condition_grid, 0},
      {"7 Picard heat demo", picard, 300},
      {"8 reproducibility", reproducibility, 0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0) o.require(secs < c.budget_seconds, "runtime " + num(secs) + " s < " + num(c.budget_seconds) + " s");
    failed += !o.pass;
    std::printf("%s criterion %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
