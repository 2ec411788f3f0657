// Acceptance suite: one PASS/FAIL line per criterion; exit status 0 iff all pass.

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ringbdg/double_well.hpp"
#include "ringbdg/ring_dynamics.hpp"
#include "ringbdg/ring_model.hpp"
#include "ringbdg/spectra.hpp"
#include "spectral_oracle.hpp"

using namespace ringbdg;
using ringbdg::testing::closed_form_set;
using ringbdg::testing::multiset_distance;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// --- ring dynamics runs shared by several criteria --------------------------

struct RingRun {
  EvolutionRecord record;
  RingParams params;
};

RingRun ring_run(double eps, double kappa_mag, Parity parity, std::uint64_t seed) {
  const auto params = RingParams::from_epsilon(eps, kappa_mag, -1);
  auto fields = seed_noise(prepare_uniform(params, parity, RingGrid(128)), 1e-4, seed);
  auto rec = evolve(fields, 1e-4, 100000, params, 100, {1, 2, 3});
  return {std::move(rec), params};
}

const RingRun& anti_run() {
  static const RingRun r = ring_run(2.0, 1.5, Parity::kAntisymmetric, 1);
  return r;
}

const RingRun& sym_run() {
  static const RingRun r = ring_run(2.0, 1.5, Parity::kSymmetric, 1);
  return r;
}

// --- criteria ---------------------------------------------------------------

Outcome spectral_identity() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> e(-5.0, 5.0), k(0.0, 5.0);
  double worst = 0.0;
  double worst_generic = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const int m = static_cast<int>(rng() % 7);
    const double eps = e(rng), kap = k(rng);
    const Parity bg = rng() % 2 ? Parity::kSymmetric : Parity::kAntisymmetric;
    const int sign = rng() % 2 ? 1 : -1;
    const auto block = build_bdg_block(m, eps, kap, bg, sign);
    worst = std::max(worst, multiset_distance(bdg_eigenvalues(block), closed_form_set(m, eps, kap, bg, sign)));
    Eigen::EigenSolver<Eigen::Matrix4d> es(ringbdg::testing::reference_block(m, eps, kap, bg, sign), false);
    std::array<std::complex<double>, 4> generic;
    for (int j = 0; j < 4; ++j) generic[j] = es.eigenvalues()[j];
    worst_generic = std::max(worst_generic, multiset_distance(generic, closed_form_set(m, eps, kap, bg, sign)) /
                                                (1.0 + block.norm()));
  }
  return {worst <= 1e-12, "10000 tuples, max |omega_block - omega_closed| = " + fmt("%.2e", worst) +
                              " (tol 1e-12); generic eigensolver cross-check " + fmt("%.1e", worst_generic) +
                              " relative"};
}

Outcome ground_state_stability() {
  const auto grid = linspace(0.0, 10.0, 100);
  int unstable = 0;
  double worst = 0.0;
  for (double eps : grid)
    for (double kap : grid) {
      const auto r = stability_report(RingParams::from_epsilon(eps, kap, -1), Parity::kSymmetric, 6);
      for (const auto& f : r.modes) worst = std::max({worst, f.omega1.imag(), f.omega2.imag()});
      if (!r.unstable_modes.empty() || r.uniform_mode_growth > kInstabilityThreshold) ++unstable;
    }
  return {unstable == 0 && worst == 0.0, "100x100 grid, m=0..6: " + std::to_string(unstable) +
                                             " unstable cells, max Im omega = " + fmt("%.1e", worst)};
}

Outcome instability_boundary() {
  const auto grid = linspace(0.0, 10.0, 100);
  const double spacing = grid[1] - grid[0];
  int mismatches = 0, off_boundary = 0, unstable_cells = 0;
  for (double eps : grid)
    for (double kap : grid) {
      const auto r = stability_report(RingParams::from_epsilon(eps, kap, -1), Parity::kAntisymmetric, 6);
      bool any = false;
      for (int m = 0; m <= 6; ++m) {
        const double threshold = kap - 0.5 * m * m;
        const bool predicted = eps > threshold && threshold > 0.0;
        const bool computed = m == 0 ? r.uniform_mode_growth > kInstabilityThreshold : r.is_unstable(m);
        any = any || computed;
        if (predicted != computed) {
          ++mismatches;
          const bool near = std::abs(eps - threshold) <= spacing || std::abs(threshold) <= spacing;
          if (!near) ++off_boundary;
        }
      }
      if (any) ++unstable_cells;
    }
  return {off_boundary == 0 && unstable_cells > 0,
          "per-mode check m=0..6 over 100x100 cells: " + std::to_string(unstable_cells) + " unstable cells, " +
              std::to_string(mismatches) + " mismatches, " + std::to_string(off_boundary) +
              " farther than one grid spacing from the boundary"};
}

Outcome nonlinear_growth() {
  const double analytic = omega2(1, 2.0, 1.5, Parity::kAntisymmetric).imag();
  const auto fit = measure_growth_rate(anti_run().record, 1);
  const double rel = std::abs(fit.rate - 2.0) / 2.0;
  int windows = 0;
  for (int m : {1, 2, 3}) {
    try {
      measure_growth_rate(sym_run().record, m);
      ++windows;
    } catch (const NoGrowthWindow&) {
    }
  }
  std::ostringstream os;
  os << "antisymmetric m=1 rate " << fit.rate << " (analytic " << analytic << ", rel err "
     << fmt("%.2e", rel) << ", tol 5e-2, fit tau " << fit.tau_begin << ".." << fit.tau_end
     << "); symmetric twin growth windows: " << windows;
  return {analytic == 2.0 && rel < 0.05 && windows == 0, os.str()};
}

Outcome conservation() {
  double worst_norm_rate = 0.0, worst_energy = 0.0;
  for (const RingRun* run : {&anti_run(), &sym_run()}) {
    const auto& r = run->record;
    const double n0 = r.norm_u[0] + r.norm_d[0];
    const double e0 = r.energy[0];
    for (std::size_t i = 1; i < r.tau.size(); ++i) {
      const double dn = std::abs(r.norm_u[i] + r.norm_d[i] - n0) / n0;
      worst_norm_rate = std::max(worst_norm_rate, dn / std::max(r.tau[i], 1.0));
      worst_energy = std::max(worst_energy, std::abs(r.energy[i] - e0) / std::abs(e0));
    }
  }
  return {worst_norm_rate < 1e-9 && worst_energy < 1e-6,
          "norm drift " + fmt("%.2e", worst_norm_rate) + " per unit tau (tol 1e-9), energy drift " +
              fmt("%.2e", worst_energy) + " over tau=10 (tol 1e-6)"};
}

Outcome fig1_sign() {
  std::vector<double> g;
  for (int i = 0; i <= 10; ++i) g.push_back(30.0 * i);
  int rows = 0, failed = 0, negative = 0;
  double min_de = 1e300, min_dmu = 1e300, worst_oracle = 0.0;
  for (double h : {0.002, 0.02, 0.05}) {
    const auto curve = sweep_g(DWellParams::standard(5.0, h, 0.0), g);
    for (const auto& r : curve.rows) {
      ++rows;
      if (!r.ok) {
        ++failed;
        continue;
      }
      min_de = std::min(min_de, r.delta_energy);
      min_dmu = std::min(min_dmu, r.delta_mu);
      if (r.delta_energy < -1e-10 || r.delta_mu < -1e-10) ++negative;
    }
    // g = 0: compare with the tridiagonal oracle on the grid the solver ended up using.
    const auto split = delta_as(DWellParams::standard(5.0, h, 0.0));
    const auto oracle = linear_oracle(split.symmetric.params);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    worst_oracle = std::max({worst_oracle, rel(curve.rows[0].energy_s, oracle.symmetric_value),
                             rel(curve.rows[0].energy_a, oracle.antisymmetric_value),
                             rel(curve.rows[0].mu_s, oracle.symmetric_value),
                             rel(curve.rows[0].mu_a, oracle.antisymmetric_value)});
  }
  std::ostringstream os;
  os << rows << " rows, " << failed << " not converged, min delta_E " << fmt("%.3e", min_de) << ", min delta_mu "
     << fmt("%.3e", min_dmu) << " (tol -1e-10); g=0 vs oracle rel err " << fmt("%.2e", worst_oracle)
     << " (tol 1e-6)";
  return {failed == 0 && negative == 0 && worst_oracle < 1e-6, os.str()};
}

Outcome fig2_delocalization() {
  const auto s30 = solve_stationary(DWellParams::standard(5.0, 0.05, 30.0), Parity::kSymmetric);
  const auto s300 = solve_stationary(DWellParams::standard(5.0, 0.05, 300.0), Parity::kSymmetric);
  bool nodes_ok = true;
  for (double g : {30.0, 300.0}) {
    const auto a = solve_stationary(DWellParams::standard(5.0, 0.05, g), Parity::kAntisymmetric);
    const int c = a.params.center();
    nodes_ok = nodes_ok && a.sign_changes() == 1 && a.phi[c] == 0.0 && a.phi[c - 1] * a.phi[c + 1] < 0.0;
  }
  std::ostringstream os;
  os << "|phi_S(0)|^2 = " << fmt("%.6e", s30.density_at_center()) << " (g=30) vs "
     << fmt("%.6e", s300.density_at_center()) << " (g=300); antisymmetric single node at xi=0: "
     << (nodes_ok ? "yes" : "no");
  return {s300.density_at_center() > s30.density_at_center() && nodes_ok, os.str()};
}

Outcome sign_covariance() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> e(-5.0, 5.0), k(0.0, 5.0);
  int spectral_mismatch = 0, label_mismatch = 0;
  for (int i = 0; i < 2000; ++i) {
    const double eps = e(rng), kap = k(rng);
    for (Parity bg : {Parity::kSymmetric, Parity::kAntisymmetric}) {
      const auto plus = stability_report(RingParams::from_epsilon(eps, kap, +1), bg, 6);
      const auto minus = stability_report(RingParams::from_epsilon(eps, kap, -1), opposite(bg), 6);
      for (int m = 0; m <= 6; ++m) {
        if (plus.modes[m].omega1 != minus.modes[m].omega1 || plus.modes[m].omega2 != minus.modes[m].omega2)
          ++spectral_mismatch;
        if (multiset_distance(bdg_eigenvalues(build_bdg_block(m, eps, kap, bg, +1)),
                              bdg_eigenvalues(build_bdg_block(m, eps, kap, opposite(bg), -1))) != 0.0)
          ++spectral_mismatch;
      }
    }
    const auto sp = stationary_states(RingParams::from_epsilon(eps, kap, +1));
    const auto sm = stationary_states(RingParams::from_epsilon(eps, kap, -1));
    if (kap > 0.0 && (sp.ground.parity != opposite(sm.ground.parity) || sp.ground.mu != sm.ground.mu ||
                      sp.excited.parity != opposite(sm.excited.parity) || sp.excited.mu != sm.excited.mu))
      ++label_mismatch;
  }

  const auto p = RingParams::from_epsilon(2.0, 1.5, -1);
  auto q = p;
  q.kappa_sign = +1;
  auto a = seed_noise(prepare_uniform(p, Parity::kAntisymmetric, RingGrid(128)), 1e-4, 7);
  auto b = a;
  for (auto& z : b.chi_d) z = -z;
  RingPropagator pa(p, a.grid, 1e-4), pb(q, b.grid, 1e-4);
  for (int s = 0; s < 10000; ++s) {
    pa.step(a);
    pb.step(b);
  }
  double gauge = 0.0;
  for (int j = 0; j < 128; ++j)
    gauge = std::max({gauge, std::abs(a.chi_u[j] - b.chi_u[j]), std::abs(a.chi_d[j] + b.chi_d[j])});

  std::ostringstream os;
  os << "frequency mismatches " << spectral_mismatch << ", label mismatches " << label_mismatch
     << " (exact); gauge map at tau=" << a.tau << ": " << fmt("%.2e", gauge) << " (tol 1e-12)";
  return {spectral_mismatch == 0 && label_mismatch == 0 && gauge < 1e-12, os.str()};
}

Outcome attractive_regime() {
  const auto params = RingParams::from_epsilon(-1.0, 0.0, -1);
  auto fields = seed_noise(prepare_uniform(params, Parity::kSymmetric, RingGrid(128)), 1e-4, 1);
  const auto rec = evolve(fields, 1e-4, 100000, params, 100, {1});
  const auto fit = measure_growth_rate(rec, 1);
  const double analytic = omega1(1, -1.0).imag();
  const double rel = std::abs(fit.rate - 1.0);

  const auto tunnel = RingParams::from_epsilon(-0.6, 1.5, -1);
  const auto anti = stability_report(tunnel, Parity::kAntisymmetric, 6);
  const auto sym = stability_report(tunnel, Parity::kSymmetric, 6);
  auto tunnel_modes = [](const StabilityReport& r) {
    int n = 0;
    for (const auto& u : r.unstable_modes) n += u.via_omega2 ? 1 : 0;
    return n;
  };
  const bool anti_m2 = anti.modes[2].omega2.imag() > kInstabilityThreshold;
  const bool sym_m2 = sym.modes[2].omega2.imag() > kInstabilityThreshold;

  std::ostringstream os;
  os << "modulational m=1 rate " << fit.rate << " (analytic " << analytic << ", tol 5%); eps=-0.6 |kappa|=1.5: "
     << "antisymmetric Im omega2(m=2)=" << fmt("%.4f", anti.modes[2].omega2.imag())
     << ", symmetric " << fmt("%.4f", sym.modes[2].omega2.imag()) << ", tunnel-induced modes anti/sym "
     << tunnel_modes(anti) << "/" << tunnel_modes(sym);
  return {analytic == 1.0 && rel < 0.05 && anti_m2 && !sym_m2 && tunnel_modes(sym) == 0, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 spectral identity", spectral_identity},
      {"AC2 ground-state stability", ground_state_stability},
      {"AC3 instability boundary", instability_boundary},
      {"AC4 nonlinear growth rate", nonlinear_growth},
      {"AC5 conservation", conservation},
      {"AC6 double-well splitting sign", fig1_sign},
      {"AC7 delocalization and nodes", fig2_delocalization},
      {"AC8 coupling-sign covariance", sign_covariance},
      {"AC9 attractive regime", attractive_regime},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
