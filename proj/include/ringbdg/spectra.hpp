#pragma once

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ringbdg/ring_model.hpp"

namespace ringbdg {

// A mode counts as dynamically unstable when Im(omega) exceeds this value.
inline constexpr double kInstabilityThreshold = 1e-9;

// Square root of a real number on the branch with Im >= 0.
std::complex<double> principal_root(double square);

// Tunnel-independent branch, sqrt((m^2 + eps)^2 - eps^2).
std::complex<double> omega1(int m, double eps);

// Tunnel-dependent branch, sqrt((m^2 + eps + 2 sigma |kappa|)^2 - eps^2) with
// sigma = +1 for a symmetric background at kappa_sign = -1. Flipping kappa_sign
// exchanges the roles of the two parities.
std::complex<double> omega2(int m, double eps, double kappa_mag, Parity background,
                            int kappa_sign = -1);

struct ModeFrequency {
  int m = 0;
  std::complex<double> omega1;
  std::complex<double> omega2;
};

// Per-mode linearisation around a uniform state, acting on
// (u_m^up, u_m^down, v_-m^up, v_-m^down):
//
//   [  D      k     eps    0  ]
//   [  k      D      0    eps ]
//   [ -eps    0     -D    -k  ]
//   [  0    -eps    -k    -D  ]
//
// with D = m^2 + 2 eps - mu and k = kappa_sign * |kappa|.
// Each entry is kept as an unevaluated sum hi + lo so that the channel sums
// formed during diagonalisation cancel without rounding loss.
struct BdgBlock {
  int m = 0;
  double eps = 0.0;
  double kappa_mag = 0.0;
  Parity background = Parity::kSymmetric;
  int kappa_sign = -1;
  std::array<double, 16> hi{};
  std::array<double, 16> lo{};

  double operator()(int row, int col) const { return hi[4 * row + col]; }
  // Maximum absolute row sum.
  double norm() const;
};

BdgBlock build_bdg_block(int m, double eps, double kappa_mag, Parity background,
                         int kappa_sign = -1);

// det(M - omega I) evaluated with pivoted complex elimination.
std::complex<double> characteristic_determinant(const BdgBlock& block, std::complex<double> omega);

class DiagnosticFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Eigenvalues as {+w_a, -w_a, +w_b, -w_b}, where a is the channel with equal
// perturbations in both rings and b the channel with opposite perturbations.
// Throws DiagnosticFailure if any value fails |det(M - w I)| <= 1e-9 ||M||^4.
std::array<std::complex<double>, 4> bdg_eigenvalues(const BdgBlock& block);

struct UnstableMode {
  int m = 0;
  double growth_rate = 0.0;
  bool via_omega1 = false;
  bool via_omega2 = false;
};

struct StabilityReport {
  RingParams params;
  Parity background = Parity::kSymmetric;
  int m_min = 0;
  int m_max = 0;
  std::vector<ModeFrequency> modes;
  // Angular modes m >= 1 with max(Im omega1, Im omega2) above threshold.
  std::vector<UnstableMode> unstable_modes;
  std::optional<UnstableMode> max_growth;
  // Im omega2 at m = 0: the uniform inter-ring (Josephson) mode. Reported
  // separately because the angular perturbation analysis covers m != 0 only.
  double uniform_mode_growth = 0.0;

  bool is_unstable(int m) const;
};

// Scans m = 0..m_max (m_max >= 1).
StabilityReport stability_report(const RingParams& params, Parity background, int m_max);

}  // namespace ringbdg
