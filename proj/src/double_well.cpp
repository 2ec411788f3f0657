#include "ringbdg/double_well.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ringbdg/fft.hpp"
#include "ringbdg/tridiagonal.hpp"

namespace ringbdg {
namespace {

constexpr double kTargetSpacing = 0.01;

void project_parity(std::vector<double>& phi, Parity parity) {
  const int n = static_cast<int>(phi.size());
  const double s = parity_sign(parity);
  for (int i = 0; i <= (n - 1) / 2; ++i) {
    const int j = n - 1 - i;
    const double v = 0.5 * (phi[i] + s * phi[j]);
    phi[i] = v;
    phi[j] = s * v;
  }
}

void normalize(std::vector<double>& phi, double dx) {
  double s = 0.0;
  for (double v : phi) s += v * v;
  const double inv = 1.0 / std::sqrt(s * dx);
  for (double& v : phi) v *= inv;
}

double energy_of(const DWellParams& p, const std::vector<double>& v, const std::vector<double>& phi) {
  const double dx = p.spacing();
  double kinetic = 0.0;
  double pot = 0.0;
  double quartic = 0.0;
  for (std::size_t i = 0; i + 1 < phi.size(); ++i) {
    const double d = phi[i + 1] - phi[i];
    kinetic += d * d;
  }
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double rho = phi[i] * phi[i];
    pot += v[i] * rho;
    quartic += rho * rho;
  }
  return kinetic / dx + dx * (pot + 0.5 * p.g_tilde * quartic);
}

std::vector<double> sample_potential(const DWellParams& p) {
  std::vector<double> v(p.n_grid);
  for (int i = 0; i < p.n_grid; ++i) v[i] = potential(p.xi(i), p);
  return v;
}

std::vector<double> default_guess(const DWellParams& p, Parity parity) {
  std::vector<double> phi(p.n_grid);
  const double s = parity_sign(parity);
  if (p.potential == PotentialKind::kHarmonic) {
    for (int i = 0; i < p.n_grid; ++i) {
      const double x = p.xi(i);
      phi[i] = (parity == Parity::kSymmetric ? 1.0 : x) * std::exp(-0.5 * x * x);
    }
  } else {
    // Harmonic approximation around each minimum: V ~ 4 h xi0^2 (xi - xi0)^2.
    const double omega = 2.0 * p.xi0 * std::sqrt(p.h);
    for (int i = 0; i < p.n_grid; ++i) {
      const double x = p.xi(i);
      const double a = x - p.xi0;
      const double b = x + p.xi0;
      phi[i] = std::exp(-0.5 * omega * a * a) + s * std::exp(-0.5 * omega * b * b);
    }
  }
  phi.front() = phi.back() = 0.0;
  return phi;
}

// Re-centres a guess from a grid with the same spacing onto n points.
std::vector<double> fit_to_grid(const std::vector<double>& guess, int n) {
  const int m = static_cast<int>(guess.size());
  std::vector<double> out(n, 0.0);
  const int shift = (n - m) / 2;
  for (int i = 0; i < m; ++i) {
    const int j = i + shift;
    if (j >= 0 && j < n) out[j] = guess[i];
  }
  out.front() = out.back() = 0.0;
  return out;
}

DWellParams extended(const DWellParams& p) {
  const int c = p.center();
  const int add = std::max(1, static_cast<int>(std::ceil(0.25 * c)));
  DWellParams q = p;
  q.n_grid = p.n_grid + 2 * add;
  q.half_length = (q.n_grid - 1) / 2 * p.spacing();
  return q;
}

class ImaginaryTimeSolver {
 public:
  ImaginaryTimeSolver(const DWellParams& p, Parity parity, const SolveOptions& opt)
      : p_(p), parity_(parity), opt_(opt), v_(sample_potential(p)), dx_(p.spacing()) {
    if (opt.scheme == ImaginaryTimeScheme::kStrangSplit) {
      const int interior = p.n_grid - 2;
      sine_.emplace(interior);
      eigen_.resize(interior);
      for (int k = 1; k <= interior; ++k) {
        const double s = std::sin(kPi * k / (2.0 * (interior + 1)));
        eigen_[k - 1] = 4.0 * s * s / (dx_ * dx_);
      }
    }
  }

  DWellSolution run(std::vector<double> phi) {
    project_parity(phi, parity_);
    normalize(phi, dx_);
    double dtau = opt_.dtau;
    double e_old = energy_of(p_, v_, phi);
    std::optional<double> mu_prev;
    Functionals f{};

    DWellSolution sol;
    sol.parity = parity_;
    sol.params = p_;
    long it = 0;
    while (it < opt_.max_iterations) {
      std::vector<double> next = phi;
      advance(next, dtau);
      project_parity(next, parity_);
      normalize(next, dx_);
      const double e_new = energy_of(p_, v_, next);
      if (opt_.step_control && e_new > e_old + 1e-13 * std::max(1.0, std::abs(e_old))) {
        dtau *= 0.5;
        if (dtau < 1e-14) break;
        continue;
      }
      phi.swap(next);
      e_old = e_new;
      ++it;
      if (it % opt_.check_every == 0) {
        f = evaluate_functionals(p_, phi);
        const bool mu_ok = mu_prev && std::abs(f.mu - *mu_prev) < opt_.mu_tolerance;
        mu_prev = f.mu;
        if (mu_ok && f.residual < opt_.residual_tolerance) {
          sol.converged = true;
          break;
        }
      }
    }
    f = evaluate_functionals(p_, phi);
    sol.phi = std::move(phi);
    sol.mu = f.mu;
    sol.energy = f.energy;
    sol.residual = f.residual;
    sol.iterations = it;
    sol.final_dtau = dtau;
    if (!sol.converged) {
      std::ostringstream msg;
      msg << "imaginary-time solve (" << to_string(parity_) << ", g=" << p_.g_tilde
          << ") not converged after " << it << " iterations: residual=" << f.residual
          << " mu=" << f.mu << " dtau=" << dtau;
      throw NotConverged(msg.str(), std::move(sol));
    }
    return sol;
  }

 private:
  void advance(std::vector<double>& phi, double dtau) {
    if (opt_.scheme == ImaginaryTimeScheme::kBackwardEuler)
      backward_euler(phi, dtau);
    else
      strang(phi, dtau);
  }

  void backward_euler(std::vector<double>& phi, double dtau) {
    const int n = p_.n_grid - 2;
    const double off = -dtau / (dx_ * dx_);
    sub_.assign(n, off);
    sup_.assign(n, off);
    diag_.resize(n);
    for (int i = 0; i < n; ++i) {
      const double u = phi[i + 1];
      diag_[i] = 1.0 + dtau * (2.0 / (dx_ * dx_) + v_[i + 1] + p_.g_tilde * u * u);
    }
    std::span<double> interior(phi.data() + 1, n);
    solve_tridiagonal(sub_, diag_, sup_, interior);
  }

  void strang(std::vector<double>& phi, double dtau) {
    const int n = p_.n_grid - 2;
    // Both half steps use the density at the start of the step; the step is then a
    // symmetric linear map and its fixed point is biased only at O(dtau^2).
    half_.resize(n + 2);
    for (int i = 1; i <= n; ++i)
      half_[i] = std::exp(-0.5 * dtau * (v_[i] + p_.g_tilde * phi[i] * phi[i]));
    for (int i = 1; i <= n; ++i) phi[i] *= half_[i];
    std::span<double> interior(phi.data() + 1, n);
    sine_->apply(interior);
    const double norm = 1.0 / (2.0 * (n + 1));
    for (int k = 0; k < n; ++k) interior[k] *= norm * std::exp(-eigen_[k] * dtau);
    sine_->apply(interior);
    for (int i = 1; i <= n; ++i) phi[i] *= half_[i];
  }

  DWellParams p_;
  Parity parity_;
  const SolveOptions& opt_;
  std::vector<double> v_;
  double dx_;
  std::optional<SineTransform> sine_;
  std::vector<double> eigen_;
  std::vector<double> sub_, diag_, sup_;
  std::vector<double> half_;
};

double tail_magnitude(const DWellSolution& s) {
  return std::max(std::abs(s.phi[1]), std::abs(s.phi[s.phi.size() - 2]));
}

}  // namespace

DWellParams DWellParams::standard(double xi0, double h, double g_tilde) {
  DWellParams p;
  p.xi0 = xi0;
  p.h = h;
  p.g_tilde = g_tilde;
  const int half = static_cast<int>(std::ceil(2.0 * xi0 / kTargetSpacing));
  p.n_grid = 2 * half + 1;
  p.half_length = half * kTargetSpacing;
  return p;
}

void DWellParams::validate() const {
  if (!std::isfinite(xi0) || xi0 <= 0.0) throw std::invalid_argument("xi0: must be > 0");
  if (potential == PotentialKind::kQuarticDoubleWell && (!std::isfinite(h) || h <= 0.0))
    throw std::invalid_argument("h: must be > 0");
  if (!std::isfinite(g_tilde)) throw std::invalid_argument("g_tilde: must be finite");
  if (!std::isfinite(half_length) || half_length <= xi0)
    throw std::invalid_argument("half_length: must exceed xi0");
  if (n_grid < 201 || n_grid % 2 == 0) throw std::invalid_argument("n_grid: must be odd and >= 201");
}

double potential(double xi, const DWellParams& params) {
  if (params.potential == PotentialKind::kHarmonic) return xi * xi;
  const double d = xi * xi - params.xi0 * params.xi0;
  return params.h * d * d;
}

int DWellSolution::sign_changes() const {
  double peak = 0.0;
  for (double v : phi) peak = std::max(peak, std::abs(v));
  const double floor = 1e-10 * peak;
  int changes = 0;
  int last = 0;
  for (double v : phi) {
    if (std::abs(v) <= floor) continue;
    const int s = v > 0 ? 1 : -1;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

Functionals evaluate_functionals(const DWellParams& params, const std::vector<double>& phi) {
  const double dx = params.spacing();
  const int n = params.n_grid;
  double kinetic = 0.0;
  double pot = 0.0;
  double quartic = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const double d = phi[i + 1] - phi[i];
    kinetic += d * d;
  }
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = potential(params.xi(i), params);
    const double rho = phi[i] * phi[i];
    pot += v[i] * rho;
    quartic += rho * rho;
  }
  kinetic /= dx;
  Functionals f;
  f.mu = kinetic + dx * (pot + params.g_tilde * quartic);
  f.energy = kinetic + dx * (pot + 0.5 * params.g_tilde * quartic);
  const double inv_dx2 = 1.0 / (dx * dx);
  for (int i = 1; i + 1 < n; ++i) {
    const double lap = (2.0 * phi[i] - phi[i - 1] - phi[i + 1]) * inv_dx2;
    const double r = lap + (v[i] + params.g_tilde * phi[i] * phi[i] - f.mu) * phi[i];
    f.residual = std::max(f.residual, std::abs(r));
  }
  return f;
}

DWellSolution solve_stationary(const DWellParams& params, Parity parity,
                               const SolveOptions& options) {
  params.validate();
  if (!(options.dtau > 0.0)) throw std::invalid_argument("dtau: must be > 0");
  if (options.check_every < 1) throw std::invalid_argument("check_every: must be >= 1");

  DWellParams p = params;
  std::vector<double> guess = options.initial_guess
                                  ? fit_to_grid(*options.initial_guess, p.n_grid)
                                  : default_guess(p, parity);
  for (int ext = 0;; ++ext) {
    ImaginaryTimeSolver solver(p, parity, options);
    DWellSolution sol = solver.run(std::move(guess));
    sol.extensions = ext;
    const double tail = tail_magnitude(sol);
    if (tail <= options.boundary_tolerance) return sol;
    if (!options.auto_extend || ext >= options.max_extensions) {
      std::ostringstream msg;
      msg << "domain too small: |phi| = " << tail << " next to xi = +-" << p.half_length;
      throw DomainTooSmall(msg.str());
    }
    p = extended(p);
    guess = fit_to_grid(sol.phi, p.n_grid);
  }
}

LinearSpectrum linear_oracle(const DWellParams& params) {
  params.validate();
  const int n = params.n_grid;
  const int c = params.center();
  const double dx = params.spacing();
  const double inv = 1.0 / (dx * dx);
  auto a = [&](int i) { return 2.0 * inv + potential(params.xi(i), params); };

  SymTridiagonal full;
  for (int i = 1; i + 1 < n; ++i) full.diag.push_back(a(i));
  full.off.assign(full.diag.size() - 1, -inv);

  // Reflection-reduced blocks over offsets j = 0..c-1 from the centre.
  SymTridiagonal even;
  for (int j = 0; j < c; ++j) even.diag.push_back(a(c + j));
  even.off.assign(c - 1, -inv);
  even.off[0] = -std::sqrt(2.0) * inv;
  SymTridiagonal odd;
  for (int j = 1; j < c; ++j) odd.diag.push_back(a(c + j));
  odd.off.assign(c - 2, -inv);

  LinearSpectrum out;
  out.lowest = {bisect_eigenvalue(full, 0), bisect_eigenvalue(full, 1)};
  out.symmetric_value = bisect_eigenvalue(even, 0);
  out.antisymmetric_value = bisect_eigenvalue(odd, 0);

  const auto ye = inverse_iteration(even, out.symmetric_value);
  const auto yo = inverse_iteration(odd, out.antisymmetric_value);
  out.symmetric_vector.assign(n, 0.0);
  out.antisymmetric_vector.assign(n, 0.0);
  out.symmetric_vector[c] = std::sqrt(2.0) * ye[0];
  for (int j = 1; j < c; ++j) {
    out.symmetric_vector[c + j] = out.symmetric_vector[c - j] = ye[j];
    out.antisymmetric_vector[c + j] = yo[j - 1];
    out.antisymmetric_vector[c - j] = -yo[j - 1];
  }
  normalize(out.symmetric_vector, dx);
  normalize(out.antisymmetric_vector, dx);
  if (out.antisymmetric_vector[c + c / 2] < 0)
    for (double& v : out.antisymmetric_vector) v = -v;
  return out;
}

Splitting delta_as(const DWellParams& params, const SolveOptions& options,
                   const std::optional<std::vector<double>>& symmetric_guess,
                   const std::optional<std::vector<double>>& antisymmetric_guess) {
  SolveOptions opt_s = options;
  if (symmetric_guess) opt_s.initial_guess = symmetric_guess;
  Splitting out;
  out.symmetric = solve_stationary(params, Parity::kSymmetric, opt_s);

  SolveOptions opt_a = options;
  if (antisymmetric_guess) opt_a.initial_guess = antisymmetric_guess;
  out.antisymmetric = solve_stationary(out.symmetric.params, Parity::kAntisymmetric, opt_a);

  if (out.antisymmetric.params.n_grid != out.symmetric.params.n_grid) {
    opt_s.initial_guess = out.symmetric.phi;
    opt_s.auto_extend = false;
    out.symmetric = solve_stationary(out.antisymmetric.params, Parity::kSymmetric, opt_s);
  }
  out.delta_energy = out.antisymmetric.energy - out.symmetric.energy;
  out.delta_mu = out.antisymmetric.mu - out.symmetric.mu;
  return out;
}

bool SplittingCurve::all_ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const SplittingRow& r) { return r.ok; });
}

SplittingCurve sweep_g(const DWellParams& params, const std::vector<double>& g_values,
                       const SolveOptions& options, bool reverse_warm_start) {
  params.validate();
  if (!std::is_sorted(g_values.begin(), g_values.end()))
    throw std::invalid_argument("g_values: must be sorted ascending");

  SplittingCurve curve;
  curve.base = params;
  curve.rows.resize(g_values.size());

  DWellParams grid = params;
  std::optional<std::vector<double>> warm_s;
  std::optional<std::vector<double>> warm_a;
  const std::size_t n = g_values.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t idx = reverse_warm_start ? n - 1 - k : k;
    SplittingRow& row = curve.rows[idx];
    row.g_tilde = g_values[idx];
    DWellParams p = grid;
    p.g_tilde = g_values[idx];
    try {
      const Splitting s = delta_as(p, options, warm_s, warm_a);
      row.energy_s = s.symmetric.energy;
      row.energy_a = s.antisymmetric.energy;
      row.delta_energy = s.delta_energy;
      row.mu_s = s.symmetric.mu;
      row.mu_a = s.antisymmetric.mu;
      row.delta_mu = s.delta_mu;
      row.center_density_s = s.symmetric.density_at_center();
      row.half_length = s.symmetric.params.half_length;
      row.ok = true;
      grid = s.symmetric.params;
      warm_s = s.symmetric.phi;
      warm_a = s.antisymmetric.phi;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  }
  return curve;
}

}  // namespace ringbdg
