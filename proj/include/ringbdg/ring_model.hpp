#pragma once

#include <complex>
#include <string_view>
#include <utility>

namespace ringbdg {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Relative sign of the two ring (or well) amplitudes.
enum class Parity { kSymmetric, kAntisymmetric };

// +1 for Symmetric, -1 for Antisymmetric.
constexpr int parity_sign(Parity p) { return p == Parity::kSymmetric ? 1 : -1; }
constexpr Parity opposite(Parity p) {
  return p == Parity::kSymmetric ? Parity::kAntisymmetric : Parity::kSymmetric;
}
std::string_view to_string(Parity p);
// Accepts "symmetric"/"antisymmetric" (also "s"/"a"); throws std::invalid_argument.
Parity parse_parity(std::string_view text);

// Dimensionless parameters of the two-ring model
//   i d_tau chi_u = -d_phi^2 chi_u + kappa chi_d + gamma |chi_u|^2 chi_u
// with kappa = kappa_sign * kappa_mag. kappa_sign = -1 is the physical case.
struct RingParams {
  double kappa_mag = 0.0;
  int kappa_sign = -1;
  double gamma = 0.0;
  double n0 = kTwoPi;

  // Picks n0 = 2 pi so that gamma == eps and the uniform background is |chi| = 1.
  static RingParams from_epsilon(double eps, double kappa_mag, int kappa_sign = -1);

  double kappa() const { return kappa_sign * kappa_mag; }

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

double epsilon(const RingParams& params);

struct UniformState {
  Parity parity = Parity::kSymmetric;
  double mu = 0.0;
  // alpha_0 of the upper ring; |amplitude|^2 == n0.
  std::complex<double> amplitude{};

  std::complex<double> lower_amplitude() const {
    return static_cast<double>(parity_sign(parity)) * amplitude;
  }
};

// Chemical potential of the uniform state with the given parity: eps + s*kappa.
double uniform_mu(const RingParams& params, Parity parity);
UniformState uniform_state(const RingParams& params, Parity parity);

struct StationaryPair {
  UniformState ground;
  UniformState excited;
};

StationaryPair stationary_states(const RingParams& params);

}  // namespace ringbdg
