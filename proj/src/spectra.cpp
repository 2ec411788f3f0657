#include "ringbdg/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>
#include <utility>

namespace ringbdg {
namespace {

// Error-free sum of two doubles: a + b == s + e exactly.
std::pair<double, double> two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  const double e = (a - (s - bb)) + (b - bb);
  return {s, e};
}

// Compensated summation; near-cancelling sums keep ~1e-32 relative accuracy,
// which both routes to the mode frequencies rely on.
double accurate_sum(std::initializer_list<double> terms) {
  double s = 0.0;
  double c = 0.0;
  for (double x : terms) {
    auto [t, e] = two_sum(s, x);
    s = t;
    c += e;
  }
  return s + c;
}

// Squared frequency as a product of two accurately summed factors.
std::complex<double> root_of_product(double f1, double f2) { return principal_root(f1 * f2); }

}  // namespace

std::complex<double> principal_root(double square) {
  if (square >= 0.0) return {std::sqrt(square), 0.0};
  return {0.0, std::sqrt(-square)};
}

std::complex<double> omega1(int m, double eps) {
  const double m2 = static_cast<double>(m) * m;
  // (m^2 + eps)^2 - eps^2 = m^2 (m^2 + 2 eps)
  return root_of_product(m2, accurate_sum({m2, 2.0 * eps}));
}

std::complex<double> omega2(int m, double eps, double kappa_mag, Parity background,
                            int kappa_sign) {
  const double m2 = static_cast<double>(m) * m;
  const double sigma = -static_cast<double>(parity_sign(background) * kappa_sign);
  const double shift = 2.0 * sigma * kappa_mag;
  return root_of_product(accurate_sum({m2, shift}), accurate_sum({m2, 2.0 * eps, shift}));
}

double BdgBlock::norm() const {
  double best = 0.0;
  for (int r = 0; r < 4; ++r) {
    double row = 0.0;
    for (int c = 0; c < 4; ++c) row += std::abs(hi[4 * r + c]);
    best = std::max(best, row);
  }
  return best;
}

BdgBlock build_bdg_block(int m, double eps, double kappa_mag, Parity background,
                         int kappa_sign) {
  BdgBlock b;
  b.m = m;
  b.eps = eps;
  b.kappa_mag = kappa_mag;
  b.background = background;
  b.kappa_sign = kappa_sign;

  const double m2 = static_cast<double>(m) * m;
  const double k = kappa_sign * kappa_mag;
  // D = m^2 + 2 eps - mu, mu = eps + s k
  auto [s1, e1] = two_sum(m2, eps);
  auto [s2, e2] = two_sum(s1, -parity_sign(background) * k);
  auto [d_hi, d_lo] = two_sum(s2, e1 + e2);

  auto set = [&b](int r, int c, double hi, double lo = 0.0) {
    b.hi[4 * r + c] = hi;
    b.lo[4 * r + c] = lo;
  };
  set(0, 0, d_hi, d_lo);
  set(0, 1, k);
  set(0, 2, eps);
  set(1, 0, k);
  set(1, 1, d_hi, d_lo);
  set(1, 3, eps);
  set(2, 0, -eps);
  set(2, 2, -d_hi, -d_lo);
  set(2, 3, -k);
  set(3, 1, -eps);
  set(3, 2, -k);
  set(3, 3, -d_hi, -d_lo);
  return b;
}

std::complex<double> characteristic_determinant(const BdgBlock& block,
                                                std::complex<double> omega) {
  std::array<std::complex<double>, 16> a;
  for (int i = 0; i < 16; ++i) a[i] = block.hi[i] + block.lo[i];
  for (int i = 0; i < 4; ++i) a[5 * i] -= omega;

  std::complex<double> det = 1.0;
  for (int col = 0; col < 4; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(a[4 * r + col]) > std::abs(a[4 * pivot + col])) pivot = r;
    if (a[4 * pivot + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (int c = 0; c < 4; ++c) std::swap(a[4 * pivot + c], a[4 * col + c]);
      det = -det;
    }
    det *= a[5 * col];
    for (int r = col + 1; r < 4; ++r) {
      const auto f = a[4 * r + col] / a[5 * col];
      for (int c = col; c < 4; ++c) a[4 * r + c] -= f * a[4 * col + c];
    }
  }
  return det;
}

std::array<std::complex<double>, 4> bdg_eigenvalues(const BdgBlock& block) {
  // With u_up = s u_down and v_up = s v_down the block reduces to
  //   [ A   eps ]      A = M00 + s M01
  //   [-eps -A  ]      w^2 = (A - eps)(A + eps)
  auto channel = [&block](double s) {
    const double a_hi = block.hi[0], a_lo = block.lo[0];
    const double coupling = s * block.hi[1];
    const double anomalous = block.hi[2];
    const double minus = accurate_sum({a_hi, a_lo, coupling, -anomalous});
    const double plus = accurate_sum({a_hi, a_lo, coupling, anomalous});
    return root_of_product(minus, plus);
  };
  const auto wa = channel(1.0);
  const auto wb = channel(-1.0);
  const std::array<std::complex<double>, 4> values{wa, -wa, wb, -wb};

  const double scale = block.norm();
  const double tol = 1e-9 * scale * scale * scale * scale;
  for (const auto& w : values) {
    const double residual = std::abs(characteristic_determinant(block, w));
    if (!(residual <= tol)) {
      std::ostringstream msg;
      msg << "bdg_eigenvalues: determinant self-check failed for m=" << block.m
          << " omega=" << w << " |det|=" << residual << " tol=" << tol;
      throw DiagnosticFailure(msg.str());
    }
  }
  return values;
}

bool StabilityReport::is_unstable(int m) const {
  return std::any_of(unstable_modes.begin(), unstable_modes.end(),
                     [m](const UnstableMode& u) { return u.m == m; });
}

StabilityReport stability_report(const RingParams& params, Parity background, int m_max) {
  params.validate();
  if (m_max < 1) throw std::invalid_argument("m_max: must be >= 1");

  StabilityReport report;
  report.params = params;
  report.background = background;
  report.m_min = 0;
  report.m_max = m_max;

  const double eps = epsilon(params);
  for (int m = 0; m <= m_max; ++m) {
    ModeFrequency f{m, omega1(m, eps),
                    omega2(m, eps, params.kappa_mag, background, params.kappa_sign)};
    report.modes.push_back(f);
    if (m == 0) {
      // omega1(0) is the global-phase Goldstone zero and never unstable.
      report.uniform_mode_growth = f.omega2.imag();
      continue;
    }
    UnstableMode u{m, std::max(f.omega1.imag(), f.omega2.imag()),
                   f.omega1.imag() > kInstabilityThreshold,
                   f.omega2.imag() > kInstabilityThreshold};
    if (u.via_omega1 || u.via_omega2) {
      report.unstable_modes.push_back(u);
      if (!report.max_growth || u.growth_rate > report.max_growth->growth_rate)
        report.max_growth = u;
    }
  }
  return report;
}

}  // namespace ringbdg
