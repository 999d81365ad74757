// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "snspec/snspec.hpp"

using namespace snspec;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

StarPolarCurve star(std::vector<double> c) { return StarPolarCurve::from_coefficients(c); }

DoublyConnectedDomain annulus_domain(double R1, double R2, double d, int N) {
  return build_domain(EccentricCircle{R2, d}, R1, 16 * N, 16 * N);
}

Outcome closed_form_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto sol = solve(annulus_domain(1.0, 2.0, 0.0, 24), {.N = 24});
  const double elapsed = seconds_since(t0);
  // l(l+n-2)(rho^{2l+n-2} - 1) / (R2((l+n-2) rho^{2l+n-2} + l)) with rho = 2, l = 1, n = 2
  const double oracle = 1.0 * 1.0 * (4.0 - 1.0) / (2.0 * (1.0 * 4.0 + 1.0));
  o.require(std::abs(sol.mu1() - oracle) <= 1e-8, fmt::format("mu1 = {:.15g}", sol.mu1()));
  o.require(sol.first_eigenspace().size() == 2, fmt::format("cluster size {}", sol.first_eigenspace().size()));
  o.require(elapsed < 1.0, fmt::format("runtime {:.3f} s", elapsed));
  o.detail = o.ok ? fmt::format("mu1 = {:.15g}, cluster 2, {:.3f} s", sol.mu1(), elapsed) : o.detail;
  return o;
}

Outcome eccentricity_sweep() {
  Outcome o;
  const auto t0 = Clock::now();
  const int N = 48;
  const LemmaQuadratureConfig q{256, 2, 1.0, 2.0};
  const double mu0 = solve(annulus_domain(1.0, 2.0, 0.0, N), {.N = N}).mu1();
  const double theta0 = rayleigh_bound_theta(0.0, q);
  o.require(std::abs(theta0 - mu1_annulus(2, 1.0, 2.0)) <= 1e-9, fmt::format("Theta(0) = {:.15g}", theta0));
  std::vector<double> ds;
  for (int k = 1; k <= 18; ++k) ds.push_back(0.05 * k);
  const auto mus = parallel_map(ds, [&](double d) { return solve(annulus_domain(1.0, 2.0, d, N), {.N = N}).mu1(); });
  double worst_gap = -1e300, worst_theta = -1e300;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    worst_gap = std::max(worst_gap, mus[i] - mu0);
    worst_theta = std::max(worst_theta, mus[i] - rayleigh_bound_theta(ds[i], q));
  }
  const double elapsed = seconds_since(t0);
  o.require(worst_gap <= 1e-8, fmt::format("max mu1(d) - mu1(0) = {:.3e}", worst_gap));
  o.require(worst_theta <= 1e-6, fmt::format("max mu1(d) - Theta(d) = {:.3e}", worst_theta));
  o.require(elapsed < 30.0, fmt::format("runtime {:.2f} s", elapsed));
  if (o.ok)
    o.detail = fmt::format("max mu1(d)-mu1(0) = {:.3e}, max mu1(d)-Theta(d) = {:.3e}, {:.2f} s", worst_gap,
                           worst_theta, elapsed);
  return o;
}

Outcome lemma_suite() {
  Outcome o;
  for (int n : {2, 3}) {
    const LemmaQuadratureConfig q{256, n, 1.0, 2.0};
    const auto ref = lemma_values(0.0, q);
    for (int k = 1; k <= 19; ++k) {
      const double d = 0.05 * k;
      const auto v = lemma_values(d, q);
      const std::string at = fmt::format("n={} d={}", n, d);
      o.require(std::abs(v.A2) <= 1e-10 && std::abs(v.V2) <= 1e-10, at + ": A2/V2");
      o.require(std::abs(v.A1 - ref.A1) <= 1e-10 * std::abs(ref.A1), at + ": A1");
      o.require(std::abs(v.V1 - ref.V1) <= 1e-10 * std::abs(ref.V1), at + ": V1");
      o.require(v.A3 - ref.A3 > 0.0 && v.V3 - ref.V3 > 0.0, at + ": A3/V3");
    }
  }
  if (o.ok) o.detail = "n = 2, 3 on d = 0.05..0.95";
  return o;
}

Outcome hole_asymptotics() {
  Outcome o;
  const std::vector<double> radii{0.2, 0.1, 0.05, 0.02, 0.01};

  const SimplyConnectedDomain disk(star({1.0}), 384, {});
  const auto drep = hole_shrink_sweep(disk, radii, {.N = 24});
  double worst = 0.0;
  for (const auto& row : drep.rows) {
    worst = std::max(worst, std::abs(std::abs(row.mu1 - 1.0) - 2.0 * row.r * row.r / (1.0 + row.r * row.r)));
    o.require(row.step1, fmt::format("disk step 1 fails at r={}", row.r));
  }
  o.require(worst <= 1e-7, fmt::format("disk deviation {:.3e}", worst));

  const int N = 56;
  const SimplyConnectedDomain outer(star({1.0, 0.0, 0.0, 0.3}), 16 * N, {});
  const auto srep = hole_shrink_sweep(outer, radii, {.N = N});
  for (std::size_t i = 0; i < srep.rows.size(); ++i) {
    const auto& row = srep.rows[i];
    o.require(row.step1, fmt::format("star step 1 fails at r={}", row.r));
    if (i > 0) {
      o.require(row.gap < srep.rows[i - 1].gap, fmt::format("gap not decreasing at r={}", row.r));
      o.require(row.trace_distance < srep.rows[i - 1].trace_distance,
                fmt::format("trace distance not decreasing at r={}", row.r));
    }
  }
  const double last_gap = srep.rows.back().gap;
  o.require(last_gap < 1e-3, fmt::format("gap at r=0.01 is {:.3e}", last_gap));
  if (o.ok)
    o.detail = fmt::format("disk deviation {:.2e}; star gap(0.01) = {:.3e}, trace distance(0.01) = {:.3e}", worst,
                           last_gap, srep.rows.back().trace_distance);
  return o;
}

Outcome nodal_suite() {
  Outcome o;
  const int N = 48;
  const std::vector<DoublyConnectedDomain> domains{
      annulus_domain(1.0, 2.0, 0.0, N),
      annulus_domain(1.0, 2.0, 0.5, N),
      build_domain(star({1.5, 0.0, 0.0, 0.2}), 0.5, 16 * N, 16 * N),
      build_domain(star({1.0, 0.0, 0.0, 0.3}), 0.4, 16 * N, 16 * N),
  };
  const char* names[] = {"concentric", "eccentric", "star 1.5+0.2cos2t", "star 1+0.3cos2t"};
  int functions = 0;
  for (std::size_t i = 0; i < domains.size(); ++i) {
    const auto sol = solve(domains[i], {.N = N});
    const auto space = sol.first_eigenspace();
    const auto samples = eigenspace_samples(sol, space, 10);
    for (int grid : {256, 1024}) {
      for (const auto& r : count_nodal_domains(domains[i], sol.basis, samples, {.grid = grid})) {
        o.require(r.count == 2, fmt::format("{} grid {}: count {}", names[i], grid, r.count));
        ++functions;
      }
    }
  }
  if (o.ok) o.detail = fmt::format("{} function/grid pairs, all with 2 nodal domains", functions);
  return o;
}

Outcome sandwich_suite() {
  Outcome o;
  const int N = 48;
  const std::vector<std::pair<std::vector<double>, double>> cases{
      {{1.5, 0.0, 0.0, 0.2}, 0.5}, {{1.0, 0.0, 0.0, 0.3}, 0.4}, {{2.0, 0.1, 0.2, 0.0, 0.1}, 0.6}};
  const auto h = RevolutionProfile::euclidean(2);
  for (const auto& [coef, R1] : cases) {
    const auto rep = sandwich_bounds(build_domain(star(coef), R1, 16 * N, 16 * N), h, {.N = N});
    o.require(rep.holds(), fmt::format("{:.6g} <= {:.6g} <= {:.6g} fails", rep.lower, rep.mu1, rep.upper));
  }
  const auto flat = sandwich_bounds(annulus_domain(1.0, 2.0, 0.0, 24), h, {.N = 24});
  o.require(flat.lower == flat.upper && std::abs(flat.mu1 - flat.upper) <= 1e-8,
            fmt::format("concentric: {:.15g} / {:.15g} / {:.15g}", flat.lower, flat.mu1, flat.upper));
  if (o.ok) o.detail = "3 star domains; concentric collapse";
  return o;
}

Outcome extension_envelope() {
  Outcome o;
  double worst = 0.0;
  for (double R : {1.0, 2.0})
    for (double q : {0.1, 0.05}) {
      const auto rep = harmonic_extension_ratio(q * R, R, 1);
      o.require(rep.ratio <= rep.envelope, fmt::format("r/R={} R={}: {:.4e} > {:.4e}", q, R, rep.ratio, rep.envelope));
      worst = std::max(worst, rep.ratio / rep.envelope);
    }
  if (o.ok) o.detail = fmt::format("max ratio/envelope = {:.4f}", worst);
  return o;
}

Outcome dumbbell_suite() {
  Outcome o;
  for (double eps : {0.1, 0.05, 0.01}) {
    const auto rep = dumbbell_bound({eps, 0.5});
    const double expected = 2.0 * std::numbers::pi * std::numbers::pi * eps;
    o.require(std::abs(rep.quotient() - expected) <= 1e-10, fmt::format("eps={}: quotient {:.15g}", eps, rep.quotient()));
    o.require(std::abs(rep.boundary_mean) <= 1e-12, fmt::format("eps={}: mean {:.3e}", eps, rep.boundary_mean));
  }
  if (o.ok) o.detail = "eps = 0.1, 0.05, 0.01";
  return o;
}

Outcome isoperimetric_suite() {
  Outcome o;
  const int N = 56;
  const SimplyConnectedDomain outer(star({1.0, 0.0, 0.0, 0.2}), 16 * N, {});
  std::string summary;
  for (auto c : {IsoConstraint::measure, IsoConstraint::perimeter}) {
    const auto rep = isoperimetric_check(outer, 0.02, c, {.N = N});
    const char* label = c == IsoConstraint::measure ? "measure" : "perimeter";
    o.require(rep.mu1 < rep.mu1_reference, fmt::format("{}: {:.15g} !< {:.15g}", label, rep.mu1, rep.mu1_reference));
    summary += fmt::format("{} gap {:.4e}; ", label, rep.difference());
  }
  const SimplyConnectedDomain disk(star({1.0}), 384, {});
  for (auto c : {IsoConstraint::measure, IsoConstraint::perimeter}) {
    const auto rep = isoperimetric_check(disk, 0.02, c, {.N = 24});
    o.require(std::abs(rep.difference()) <= 1e-8, fmt::format("disk difference {:.3e}", rep.difference()));
  }
  if (o.ok) o.detail = summary + "disk equality";
  return o;
}

Outcome solver_properties() {
  Outcome o;
  const auto dom = build_domain(star({1.5, 0.0, 0.0, 0.2}), 0.5, 768, 768);
  const SolverOptions opts{.N = 48};
  const double mu = solve(dom, opts).mu1();
  for (double s : {0.5, 2.0}) {
    const double scaled = solve(dom.scaled(s), opts).mu1();
    o.require(std::abs(scaled * s - mu) <= 1e-8 * mu, fmt::format("scaling s={}: {:.15g}", s, scaled));
  }
  const double moved = solve(dom.translated({2.5, -1.25}), opts).mu1();
  o.require(std::abs(moved - mu) <= 1e-9, fmt::format("translation: {:.15g} vs {:.15g}", moved, mu));
  const auto disk = solve(SimplyConnectedDomain(star({1.0}), 384, {}), {.N = 24, .mode = ProblemMode::steklov});
  for (int k = 1; k <= 5; ++k)
    for (int j : {2 * k - 1, 2 * k})
      o.require(std::abs(disk.eigenvalues.at(j) - k) <= 1e-8, fmt::format("sigma_{} = {:.15g}", j, disk.eigenvalues.at(j)));
  if (o.ok) o.detail = fmt::format("mu1 = {:.12g}; disk sigma_1..10 = 1,1,...,5,5", mu);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"closed-form oracle on the concentric annulus", closed_form_oracle},
      {"eccentricity sweep and Rayleigh bound", eccentricity_sweep},
      {"lemma integrals", lemma_suite},
      {"shrinking-hole asymptotics", hole_asymptotics},
      {"nodal domains of the first eigenspace", nodal_suite},
      {"star-shaped sandwich bounds", sandwich_suite},
      {"harmonic-extension envelope", extension_envelope},
      {"dumbbell quotient", dumbbell_suite},
      {"equal-measure and equal-perimeter comparison", isoperimetric_suite},
      {"solver covariance and disk spectrum", solver_properties},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.ok) ++failures;
    std::printf("%s %2zu %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
