#pragma once

// Experiment runners behind the command-line front end. Each runner turns a
// validated config into a table, an optional plot, and a list of checks.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "snspec/closed_forms.hpp"
#include "snspec/config.hpp"
#include "snspec/geometry.hpp"
#include "snspec/lemma_integrals.hpp"
#include "snspec/nodal_domains.hpp"
#include "snspec/parallel.hpp"
#include "snspec/report.hpp"
#include "snspec/spectral_analysis.hpp"
#include "snspec/trefftz_solver.hpp"

namespace snspec {

enum class Command { exact, solve, sweep, lemmas, nodal, dumbbell, sandwich, isoperimetric };

inline constexpr int kExitOk = 0;
inline constexpr int kExitAssertion = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDiagnostic = 3;

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  Table table;
  std::optional<PlotSpec> plot;
  std::vector<Check> checks;
  std::vector<std::string> diagnostics;
  std::vector<std::string> breaches;
};

namespace detail {

template <class F>
auto as_config_error(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

inline double require(const std::optional<double>& v, const char* key) {
  if (!v) throw ConfigError(std::string("domain.") + key + " is required for this experiment");
  return *v;
}

inline int boundary_samples(const ExperimentConfig& c, int configured) {
  return configured > 0 ? configured : 16 * c.solver.N;
}

inline OuterShape outer_shape(const ExperimentConfig& c) {
  const auto& d = c.domain;
  return as_config_error([&]() -> OuterShape {
    if (d.kind == "concentric") return EccentricCircle{require(d.R2, "R2"), 0.0};
    if (d.kind == "eccentric") return EccentricCircle{require(d.R2, "R2"), d.d};
    if (d.kind == "star") {
      if (d.rho.empty()) throw ConfigError("domain.rho_coefficients is required for a star domain");
      return StarPolarCurve::from_coefficients(d.rho);
    }
    throw ConfigError("domain.kind: expected concentric, eccentric or star, got '" + d.kind + "'");
  });
}

inline bool outer_is_circle_about_pole(const ExperimentConfig& c) {
  if (c.domain.kind == "concentric") return true;
  if (c.domain.kind == "eccentric") return c.domain.d == 0.0;
  return StarPolarCurve::from_coefficients(c.domain.rho).is_constant();
}

inline SimplyConnectedDomain outer_domain(const ExperimentConfig& c) {
  const OuterShape shape = outer_shape(c);
  return as_config_error([&] { return SimplyConnectedDomain(shape, boundary_samples(c, c.domain.m_out)); });
}

inline DoublyConnectedDomain hole_domain(const ExperimentConfig& c) {
  const OuterShape shape = outer_shape(c);
  const double R1 = require(c.domain.R1, "R1");
  return as_config_error([&] {
    return DoublyConnectedDomain(shape, R1, boundary_samples(c, c.domain.m_out), boundary_samples(c, c.domain.m_in));
  });
}

inline void validate_solver(const SolverOptions& s) {
  if (s.N < 1 || s.N > 200) throw ConfigError("solver.N must be in [1, 200]");
  if (s.m_out != 0 && (s.m_out < 16 || s.m_out % 2)) throw ConfigError("solver.m_out must be even and >= 16");
  if (s.m_in != 0 && (s.m_in < 16 || s.m_in % 2)) throw ConfigError("solver.m_in must be even and >= 16");
  if (!(s.tau_M > 0.0) || !(s.tau_M < 1.0)) throw ConfigError("solver.tau_M must be in (0, 1)");
  if (!(s.tau_0 > 0.0) || !(s.tau_0 < 1.0)) throw ConfigError("solver.tau_0 must be in (0, 1)");
  if (!(s.flux_threshold > 0.0)) throw ConfigError("solver.flux_threshold must be positive");
}

inline void require_values(const ExperimentConfig& c) {
  if (c.grid.values.empty()) throw ConfigError("grid: no parameter values given");
}

inline Check check(std::string name, bool ok, std::string detail = {}) {
  return {std::move(name), ok, std::move(detail)};
}

inline void record_solution(ExperimentResult& res, const std::string& label, const EigenSolution& sol,
                            const ExperimentConfig& c) {
  const auto& d = sol.diagnostics;
  const double flux = first_eigenspace_flux_residual(sol);
  std::string line = fmt::format("{}: dim={} mass_rank={} retained={} zero_modes={} asymmetry={:.2e}", label,
                                 d.basis_dimension, d.mass_rank, d.retained, d.zero_modes, d.stiffness_asymmetry);
  if (!d.neumann_flux_residual.empty()) line += fmt::format(" flux_residual={:.2e}", flux);
  if (std::isfinite(d.self_convergence_delta)) line += fmt::format(" self_convergence={:.2e}", d.self_convergence_delta);
  res.diagnostics.push_back(line);
  if (flux > c.solver.flux_threshold)
    res.breaches.push_back(fmt::format("{}: Neumann flux residual {:.3e} above {:.1e}", label, flux,
                                       c.solver.flux_threshold));
  if (std::isfinite(d.self_convergence_delta) && d.self_convergence_delta > c.convergence_threshold)
    res.breaches.push_back(fmt::format("{}: self-convergence delta {:.3e} above {:.1e}", label,
                                       d.self_convergence_delta, c.convergence_threshold));
}

inline bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

// ---------------------------------------------------------------------------

inline ExperimentResult run_exact(const ExperimentConfig& c) {
  const AnnulusSpec spec{c.domain.n, require(c.domain.R1, "R1"), require(c.domain.R2, "R2"), 0.0};
  as_config_error([&] { spec.validate(); return 0; });
  std::vector<int> ls;
  if (c.grid.values.empty()) {
    for (int l = 0; l <= 8; ++l) ls.push_back(l);
  } else {
    for (double v : c.grid.values) {
      if (v != std::floor(v) || v < 0 || v > kMaxHarmonicIndex) throw ConfigError("grid.values: l must be an integer in [0, 64]");
      ls.push_back(static_cast<int>(v));
    }
  }
  ExperimentResult res;
  res.table.columns = {"l", "mu_l", "multiplicity"};
  std::vector<double> vals;
  for (int l : ls) {
    const auto ev = mu_l_concentric(spec, l);
    res.table.add_row({static_cast<double>(l), ev.value, static_cast<double>(ev.multiplicity)});
    vals.push_back(ev.value);
  }
  bool increasing = true;
  for (std::size_t i = 1; i < ls.size(); ++i)
    if (ls[i] > ls[i - 1] && !(vals[i] > vals[i - 1])) increasing = false;
  res.checks.push_back(check("mu_0 = 0", mu_l_concentric(spec, 0).value == 0.0));
  res.checks.push_back(check("mu_l strictly increasing in l", increasing));
  std::vector<double> x(ls.begin(), ls.end());
  res.plot = PlotSpec{"Concentric annulus eigenvalues", "l", "mu_l", {{"mu_l", x, vals}}};
  return res;
}

inline ExperimentResult run_solve(const ExperimentConfig& c) {
  ExperimentResult res;
  std::optional<EigenSolution> sol;
  bool concentric_annulus = false;
  AnnulusSpec spec;
  if (c.domain.R1) {
    const auto domain = hole_domain(c);
    concentric_annulus = outer_is_circle_about_pole(c);
    if (concentric_annulus) spec = {2, domain.R1(), domain.R_M(), 0.0};
    sol = solve(domain, c.solver);
  } else {
    if (c.solver.mode != ProblemMode::steklov)
      throw ConfigError("domain without hole (no R1) needs solver.mode = steklov");
    sol = solve(outer_domain(c), c.solver);
  }
  record_solution(res, "solve", *sol, c);
  res.table.columns = {"index", "mu", "cluster", "multiplicity", "flux_residual"};
  const auto clusters = sol->clusters();
  const std::size_t shown = std::min<std::size_t>(sol->size(), 24);
  for (std::size_t ci = 0; ci < clusters.size(); ++ci)
    for (std::size_t k : clusters[ci]) {
      if (k >= shown) continue;
      const double flux = sol->diagnostics.neumann_flux_residual.empty() ? 0.0 : sol->diagnostics.neumann_flux_residual[k];
      res.table.add_row({static_cast<double>(k), sol->eigenvalues[k], static_cast<double>(ci),
                         static_cast<double>(clusters[ci].size()), flux});
    }
  const double zero_tol = c.solver.tau_0;
  res.checks.push_back(check("constant mode present", std::abs(sol->eigenvalues.front()) <= zero_tol,
                             fmt::format("mu_0 = {:.3e}", sol->eigenvalues.front())));
  res.checks.push_back(check("mu_1 > 0", sol->mu1() > 0.0, fmt::format("mu_1 = {:.17g}", sol->mu1())));
  if (concentric_annulus && c.solver.mode == ProblemMode::steklov_neumann) {
    const double exact = mu_l_concentric(spec, 1).value;
    res.checks.push_back(check("mu_1 matches the concentric closed form",
                               std::abs(sol->mu1() - exact) <= c.asserts.tolerance,
                               fmt::format("|{:.17g} - {:.17g}|", sol->mu1(), exact)));
  }
  return res;
}

inline ExperimentResult run_eccentricity(const ExperimentConfig& c) {
  if (c.domain.n != 2) throw ConfigError("eccentricity: planar sweep only (domain.n = 2)");
  const double R1 = require(c.domain.R1, "R1");
  const double R2 = require(c.domain.R2, "R2");
  require_values(c);
  const int m_out = boundary_samples(c, c.domain.m_out);
  const int m_in = boundary_samples(c, c.domain.m_in);
  as_config_error([&] {
    for (double d : c.grid.values) build_annulus({2, R1, R2, d}, m_out, m_in);
    return 0;
  });
  const LemmaQuadratureConfig qcfg{c.grid.nodes, 2, R1, R2};
  as_config_error([&] { qcfg.validate(); return 0; });

  ExperimentResult res;
  const EigenSolution ref = solve(build_annulus({2, R1, R2, 0.0}, m_out, m_in), c.solver);
  record_solution(res, "d=0", ref, c);
  const double mu0 = ref.mu1();
  const double exact = mu1_annulus(2, R1, R2);
  const double theta0 = rayleigh_bound_theta(0.0, qcfg);

  struct Row {
    EigenSolution sol;
    double theta;
  };
  const auto rows = parallel_map(c.grid.values, [&](double d) {
    return Row{solve(build_annulus({2, R1, R2, d}, m_out, m_in), c.solver), rayleigh_bound_theta(d, qcfg)};
  });

  res.table.columns = {"d", "mu1", "multiplicity", "theta_bound", "mu1_concentric", "residual_gamma1"};
  bool below_concentric = true, below_theta = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double d = c.grid.values[i];
    const auto& s = rows[i].sol;
    record_solution(res, fmt::format("d={}", d), s, c);
    const double mu1 = s.mu1();
    res.table.add_row({d, mu1, static_cast<double>(s.first_eigenspace().size()), rows[i].theta, exact,
                       first_eigenspace_flux_residual(s)});
    if (mu1 > mu0 + c.asserts.tolerance) below_concentric = false;
    if (mu1 > rows[i].theta + 1e-6) below_theta = false;
  }
  res.checks.push_back(check("mu1(d) <= mu1(0) for every d", below_concentric, fmt::format("mu1(0) = {:.17g}", mu0)));
  res.checks.push_back(check("mu1(d) <= Theta(d) + 1e-6 for every d", below_theta));
  res.checks.push_back(check("Theta(0) equals the concentric closed form", std::abs(theta0 - exact) <= 1e-9,
                             fmt::format("Theta(0) = {:.17g}, closed form {:.17g}", theta0, exact)));
  res.plot = PlotSpec{"First eigenvalue against eccentricity", "d", "eigenvalue",
                      {{"mu1 (solver)", res.table.column("d"), res.table.column("mu1")},
                       {"Theta(d)", res.table.column("d"), res.table.column("theta_bound")}}};
  return res;
}

inline ExperimentResult run_hole_shrink(const ExperimentConfig& c) {
  require_values(c);
  const SimplyConnectedDomain outer = outer_domain(c);
  SolverOptions opts = c.solver;
  if (opts.m_in == 0) opts.m_in = boundary_samples(c, c.domain.m_in);
  ExperimentResult res;
  const HoleShrinkReport rep = as_config_error([&] {
    // radii are validated before any solve happens
    for (std::size_t i = 0; i < c.grid.values.size(); ++i) {
      const double r = c.grid.values[i];
      if (!(r > 0.0) || !(r < outer.R_m()) || (i > 0 && !(r < c.grid.values[i - 1])))
        throw ConfigError("grid.values: radii must be positive, strictly decreasing and inside the outer domain");
    }
    return hole_shrink_sweep(outer, c.grid.values, opts);
  });
  res.diagnostics.push_back(fmt::format("sigma1(outer) = {:.17g}, multiplicity {}", rep.sigma1, rep.sigma1_multiplicity));
  res.table.columns = {"r", "mu1", "sigma1", "gap", "trace_distance", "residual_gamma1"};
  bool step1 = true;
  for (const auto& row : rep.rows) {
    res.table.add_row({row.r, row.mu1, rep.sigma1, row.gap, row.trace_distance, row.flux_residual});
    step1 = step1 && row.step1;
    res.diagnostics.push_back(fmt::format("r={}: flux_residual={:.2e}", row.r, row.flux_residual));
    if (row.flux_residual > c.solver.flux_threshold)
      res.breaches.push_back(fmt::format("r={}: Neumann flux residual {:.3e} above {:.1e}", row.r,
                                         row.flux_residual, c.solver.flux_threshold));
  }
  const auto gaps = res.table.column("gap");
  const auto dist = res.table.column("trace_distance");
  bool dist_ok = true;
  for (std::size_t i = 1; i < dist.size(); ++i)
    if (!(dist[i] < dist[i - 1]) && !(dist[i] <= 1e-10 && dist[i - 1] <= 1e-10)) dist_ok = false;
  res.checks.push_back(check("mu1(r) <= sigma1 + 1e-8 at every r", step1));
  res.checks.push_back(check("gap strictly decreasing as r decreases", strictly_decreasing(gaps)));
  res.checks.push_back(check("trace distance strictly decreasing (or at round-off)", dist_ok));
  if (outer_is_circle_about_pole(c)) {
    const double R = outer.R_M();
    double worst = 0.0;
    for (const auto& row : rep.rows) worst = std::max(worst, std::abs(row.gap - (1.0 / R - mu1_annulus(2, row.r, R))));
    res.checks.push_back(check("disk gaps match the closed form within 1e-7", worst <= 1e-7,
                               fmt::format("max deviation {:.3e}", worst)));
  }
  res.plot = PlotSpec{"Shrinking hole", "r", "eigenvalue",
                      {{"mu1(r)", res.table.column("r"), res.table.column("mu1")},
                       {"sigma1(outer)", res.table.column("r"), res.table.column("sigma1")}}};
  return res;
}

inline ExperimentResult run_lemmas(const ExperimentConfig& c) {
  const double R1 = require(c.domain.R1, "R1");
  const double R2 = require(c.domain.R2, "R2");
  const LemmaQuadratureConfig qcfg{c.grid.nodes, c.domain.n, R1, R2};
  as_config_error([&] { qcfg.validate(); return 0; });
  std::vector<double> ds = c.grid.values;
  if (ds.empty())
    for (int k = 0; k <= 9; ++k) ds.push_back(0.1 * k * (R2 - R1));
  for (double d : ds)
    if (!(d >= 0.0) || !(d < R2 - R1)) throw ConfigError("grid.values: offsets must satisfy 0 <= d < R2 - R1");

  const LemmaValues ref = lemma_values(0.0, qcfg);
  const double theta0 = rayleigh_bound_theta(0.0, qcfg);
  const auto vals = parallel_map(ds, [&](double d) { return std::pair{lemma_values(d, qcfg), rayleigh_bound_theta(d, qcfg)}; });

  ExperimentResult res;
  res.table.columns = {"d", "A1", "A2", "A3", "V1", "V2", "V3", "theta"};
  bool a2 = true, a1 = true, a3 = true, theta_ok = true;
  for (const auto& [v, th] : vals) {
    res.table.add_row({v.d, v.A1, v.A2, v.A3, v.V1, v.V2, v.V3, th});
    a2 = a2 && std::abs(v.A2) <= 1e-10 && std::abs(v.V2) <= 1e-10;
    a1 = a1 && std::abs(v.A1 - ref.A1) <= 1e-10 * std::abs(ref.A1) && std::abs(v.V1 - ref.V1) <= 1e-10 * std::abs(ref.V1);
    if (v.d > 0.0) a3 = a3 && v.A3 > ref.A3 && v.V3 > ref.V3;
    theta_ok = theta_ok && th <= theta0 + 1e-12;
  }
  const double exact = mu_l_concentric({c.domain.n, R1, R2, 0.0}, 1).value;
  res.checks.push_back(check("A2(d) = V2(d) = 0", a2));
  res.checks.push_back(check("A1(d) = A1(0) and V1(d) = V1(0)", a1));
  res.checks.push_back(check("A3(d) > A3(0) and V3(d) > V3(0) for d > 0", a3));
  res.checks.push_back(check("Theta(d) <= Theta(0)", theta_ok));
  res.checks.push_back(check("Theta(0) equals mu_1 of the concentric annulus", std::abs(theta0 - exact) <= 1e-9,
                             fmt::format("{:.17g} vs {:.17g}", theta0, exact)));
  res.plot = PlotSpec{"Rayleigh bound against offset", "d", "Theta(d)",
                      {{"Theta(d)", res.table.column("d"), res.table.column("theta")}}};
  return res;
}

inline ExperimentResult run_nodal(const ExperimentConfig& c) {
  const auto domain = hole_domain(c);
  for (int g : c.grid.resolutions)
    if (g < 256) throw ConfigError("grid.resolutions: each grid must be at least 256");
  if (c.grid.random < 0) throw ConfigError("grid.random must be >= 0");
  ExperimentResult res;
  const EigenSolution sol = solve(domain, c.solver);
  record_solution(res, "nodal", sol, c);
  const auto space = sol.first_eigenspace();
  const Eigen::MatrixXd funcs = eigenspace_samples(sol, space, c.grid.random);
  res.table.columns = {"resolution", "function", "random", "count", "sampled", "zero_band"};
  bool all_two = true;
  for (int g : c.grid.resolutions) {
    const auto reps = count_nodal_domains(domain, sol.basis, funcs, NodalOptions{g});
    for (std::size_t f = 0; f < reps.size(); ++f) {
      res.table.add_row({static_cast<double>(g), static_cast<double>(f), f >= space.size() ? 1.0 : 0.0,
                         static_cast<double>(reps[f].count), static_cast<double>(reps[f].sampled),
                         static_cast<double>(reps[f].zero_band)});
      all_two = all_two && reps[f].count == 2;
    }
  }
  res.checks.push_back(check("every first-eigenspace function has exactly 2 nodal domains", all_two,
                             fmt::format("eigenspace dimension {}", space.size())));
  return res;
}

inline ExperimentResult run_dumbbell(const ExperimentConfig& c) {
  require_values(c);
  const double R1 = c.domain.R1.value_or(0.5);
  std::vector<DumbbellSpec> specs;
  for (double eps : c.grid.values) {
    specs.push_back({eps, R1});
    as_config_error([&] { specs.back().validate(); return 0; });
  }
  ExperimentResult res;
  res.table.columns = {"eps", "quotient", "expected", "numerator", "denominator", "boundary_integral", "boundary_mean"};
  double worst = 0.0, worst_mean = 0.0;
  for (const auto& s : specs) {
    const auto rep = dumbbell_bound(s);
    const double expected = 2.0 * std::numbers::pi * std::numbers::pi * s.eps;
    res.table.add_row({s.eps, rep.quotient(), expected, rep.numerator, rep.denominator, rep.boundary_integral,
                       rep.boundary_mean});
    worst = std::max(worst, std::abs(rep.quotient() - expected));
    worst_mean = std::max(worst_mean, std::abs(rep.boundary_mean));
  }
  std::vector<double> eps = res.table.column("eps"), q = res.table.column("quotient");
  bool monotone = true;
  for (std::size_t i = 1; i < eps.size(); ++i)
    if ((eps[i] < eps[i - 1]) != (q[i] < q[i - 1])) monotone = false;
  res.checks.push_back(check("quotient equals 2 pi^2 eps within 1e-10", worst <= 1e-10, fmt::format("max error {:.3e}", worst)));
  res.checks.push_back(check("boundary mean of v vanishes within 1e-12", worst_mean <= 1e-12,
                             fmt::format("max |mean| {:.3e}", worst_mean)));
  res.checks.push_back(check("quotient decreases with eps", monotone));
  res.plot = PlotSpec{"Dumbbell Rayleigh quotient", "eps", "quotient", {{"quotient", eps, q}}};
  return res;
}

inline ExperimentResult run_sandwich(const ExperimentConfig& c) {
  if (c.profile != "euclidean") throw ConfigError("sandwich: only the euclidean profile is solver-backed");
  const auto domain = hole_domain(c);
  ExperimentResult res;
  const auto rep = sandwich_bounds(domain, RevolutionProfile::euclidean(2), c.solver);
  res.diagnostics.push_back(fmt::format("sandwich: flux_residual={:.2e}", rep.flux_residual));
  if (rep.flux_residual > c.solver.flux_threshold)
    res.breaches.push_back(fmt::format("Neumann flux residual {:.3e} above {:.1e}", rep.flux_residual, c.solver.flux_threshold));
  res.table.columns = {"R1", "R_m", "R_M", "a", "C1", "C2", "lower", "mu1", "upper"};
  res.table.add_row({domain.R1(), rep.R_m, rep.R_M, rep.a, rep.C1, rep.C2, rep.lower, rep.mu1, rep.upper});
  const double tol = c.asserts.tolerance;
  res.checks.push_back(check("lower <= mu1", rep.lower <= rep.mu1 + tol, fmt::format("{:.17g} <= {:.17g}", rep.lower, rep.mu1)));
  res.checks.push_back(check("mu1 <= upper", rep.mu1 <= rep.upper + tol, fmt::format("{:.17g} <= {:.17g}", rep.mu1, rep.upper)));
  if (rep.R_m == rep.R_M)
    res.checks.push_back(check("sandwich collapses to equality", rep.lower == rep.upper && std::abs(rep.mu1 - rep.upper) <= tol));
  return res;
}

inline ExperimentResult run_isoperimetric(const ExperimentConfig& c) {
  require_values(c);
  const SimplyConnectedDomain outer = outer_domain(c);
  std::vector<IsoConstraint> constraints;
  if (c.constraint == "measure" || c.constraint == "both") constraints.push_back(IsoConstraint::measure);
  if (c.constraint == "perimeter" || c.constraint == "both") constraints.push_back(IsoConstraint::perimeter);
  if (constraints.empty()) throw ConfigError("experiment.constraint: expected measure, perimeter or both");
  const IsoperimetricOptions iso{c.smallness};
  for (double r : c.grid.values)
    if (!(r > 0.0) || r > iso.smallness * outer.R_m())
      throw ConfigError("grid.values: hole radius outside (0, smallness * R_m]");
  if (std::find(constraints.begin(), constraints.end(), IsoConstraint::perimeter) != constraints.end() &&
      min_convexity_indicator(outer.shape()) < -iso.convexity_tol * outer.R_M() * outer.R_M())
    throw ConfigError("perimeter constraint needs a convex outer domain");

  SolverOptions opts = c.solver;
  if (opts.m_in == 0) opts.m_in = boundary_samples(c, c.domain.m_in);
  const bool disk = outer_is_circle_about_pole(c);
  ExperimentResult res;
  res.table.columns = {"r", "constraint", "reference_radius", "mu1", "mu1_reference", "difference"};
  bool ok = true;
  for (double r : c.grid.values)
    for (auto k : constraints) {
      const auto rep = isoperimetric_check(outer, r, k, opts, iso);
      res.table.add_row({r, k == IsoConstraint::measure ? 0.0 : 1.0, rep.reference_radius, rep.mu1, rep.mu1_reference,
                         rep.difference()});
      if (rep.flux_residual > c.solver.flux_threshold)
        res.breaches.push_back(fmt::format("r={}: Neumann flux residual {:.3e} above {:.1e}", r, rep.flux_residual,
                                           c.solver.flux_threshold));
      ok = ok && (disk ? std::abs(rep.difference()) <= c.asserts.tolerance : rep.difference() > 0.0);
    }
  res.checks.push_back(check(disk ? "disk: mu1 equals the reference annulus value" : "mu1 strictly below the reference annulus value", ok));
  return res;
}

inline std::string kind_for(Command cmd, const std::string& configured) {
  const char* fixed = nullptr;
  switch (cmd) {
    case Command::exact: fixed = "exact"; break;
    case Command::solve: fixed = "solve"; break;
    case Command::lemmas: fixed = "lemmas"; break;
    case Command::nodal: fixed = "nodal"; break;
    case Command::dumbbell: fixed = "dumbbell"; break;
    case Command::sandwich: fixed = "sandwich"; break;
    case Command::isoperimetric: fixed = "isoperimetric"; break;
    case Command::sweep:
      if (configured != "eccentricity" && configured != "hole_shrink")
        throw ConfigError("sweep: experiment.kind must be eccentricity or hole_shrink");
      return configured;
  }
  if (!configured.empty() && configured != fixed)
    throw ConfigError(fmt::format("experiment.kind '{}' does not match the '{}' command", configured, fixed));
  return fixed;
}

}  // namespace detail

/// Runs one experiment and returns its table and checks. Throws ConfigError
/// for invalid input and SolverError when the discretization fails.
inline ExperimentResult run_experiment(const std::string& kind, const ExperimentConfig& c) {
  detail::validate_solver(c.solver);
  if (kind == "exact") return detail::run_exact(c);
  if (kind == "solve") return detail::run_solve(c);
  if (kind == "eccentricity") return detail::run_eccentricity(c);
  if (kind == "hole_shrink") return detail::run_hole_shrink(c);
  if (kind == "lemmas") return detail::run_lemmas(c);
  if (kind == "nodal") return detail::run_nodal(c);
  if (kind == "dumbbell") return detail::run_dumbbell(c);
  if (kind == "sandwich") return detail::run_sandwich(c);
  if (kind == "isoperimetric") return detail::run_isoperimetric(c);
  throw ConfigError("unknown experiment kind '" + kind + "'");
}

/// Full command: parse, run, write CSV (and SVG), print a summary. Returns the
/// process exit status.
inline int run_command(Command cmd, const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
                       std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  std::string kind;
  try {
    cfg = parse_config(config_path);
    apply_environment(cfg);
    kind = detail::kind_for(cmd, cfg.kind);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  ExperimentResult res;
  try {
    res = run_experiment(kind, cfg);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SolverError& e) {
    err << "solver diagnostic failure: " << e.what() << '\n';
    return kExitDiagnostic;
  }

  try {
    std::filesystem::create_directories(out_dir);
    const std::string csv = cfg.output.csv.empty() ? kind + ".csv" : cfg.output.csv;
    write_text(out_dir / csv, to_csv(res.table));
    out << "wrote " << (out_dir / csv).string() << '\n';
    if (cfg.output.svg && res.plot) {
      const auto svg = out_dir / std::filesystem::path(csv).replace_extension(".svg");
      write_text(svg, render_svg(*res.plot));
      out << "wrote " << svg.string() << '\n';
    }
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << '\n';
    return kExitConfig;
  }

  out << "experiment: " << kind << '\n';
  for (const auto& d : res.diagnostics) out << "  diag " << d << '\n';
  int failed = 0;
  for (const auto& ch : res.checks) {
    const bool pass = ch.passed || !cfg.asserts.enabled;
    if (!ch.passed) ++failed;
    out << (ch.passed ? "  PASS " : (pass ? "  SKIP " : "  FAIL ")) << ch.name;
    if (!ch.detail.empty()) out << " (" << ch.detail << ')';
    out << '\n';
  }
  for (const auto& b : res.breaches) out << "  BREACH " << b << '\n';
  out << "summary: " << res.checks.size() - static_cast<std::size_t>(failed) << '/' << res.checks.size()
      << " checks passed, " << res.breaches.size() << " diagnostic breaches\n";
  if (!res.breaches.empty()) return kExitDiagnostic;
  if (failed > 0 && cfg.asserts.enabled) return kExitAssertion;
  return kExitOk;
}

}  // namespace snspec
