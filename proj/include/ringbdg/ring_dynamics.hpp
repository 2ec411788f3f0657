#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ringbdg/fft.hpp"
#include "ringbdg/ring_model.hpp"

namespace ringbdg {

using cplx = std::complex<double>;

// Periodic azimuthal grid phi_j = 2 pi j / n. Fourier slot k holds mode
// m = k for k < n/2 and m = k - n otherwise.
class RingGrid {
 public:
  // n must be a power of two, n >= 16.
  explicit RingGrid(int n_points = 128);

  int size() const { return n_; }
  double angle(int j) const { return kTwoPi * j / n_; }
  int mode_of_slot(int k) const { return k < n_ / 2 ? k : k - n_; }
  // Slot of mode m, m in [-n/2, n/2).
  int slot_of_mode(int m) const;

 private:
  int n_;
};

enum class Ring { kUp, kDown };

struct RingFields {
  RingGrid grid;
  std::vector<cplx> chi_u;
  std::vector<cplx> chi_d;
  double tau = 0.0;
  // |chi| of the uniform background, sqrt(n0 / 2 pi).
  double background = 1.0;
  // Per-component noise standard deviation relative to the background; 0 if unseeded.
  double seed_amplitude = 0.0;

  const std::vector<cplx>& ring(Ring r) const { return r == Ring::kUp ? chi_u : chi_d; }
};

// Fourier amplitudes alpha_m with chi = (2 pi)^(-1/2) sum_m alpha_m exp(i m phi),
// indexed by slot.
std::vector<cplx> fourier_amplitudes(const RingFields& fields, Ring ring);

RingFields prepare_uniform(const RingParams& params, Parity parity, const RingGrid& grid);

// Adds an independent complex Gaussian to the coefficient of every mode m != 0
// of both rings; real and imaginary parts have standard deviation
// amplitude * background. Deterministic in (seed, grid).
RingFields seed_noise(RingFields fields, double amplitude, std::uint64_t seed);

class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double tau) : std::runtime_error(what), tau_(tau) {}
  double tau() const { return tau_; }

 private:
  double tau_;
};

// Strang splitting: half nonlinear phase, exact linear step in Fourier space
// (kinetic phase combined with the 2x2 tunnel rotation), half nonlinear phase.
class RingPropagator {
 public:
  RingPropagator(const RingParams& params, const RingGrid& grid, double dt);

  double dt() const { return dt_; }
  // Throws BlowUpError on a non-finite sample.
  void step(RingFields& fields);

 private:
  void nonlinear_half(std::vector<cplx>& chi) const;

  RingParams params_;
  int n_;
  double dt_;
  std::vector<cplx> kinetic_phase_;  // exp(-i m^2 dt) / n
  double tunnel_cos_;
  double tunnel_sin_;
  ComplexFft fft_;
  std::vector<cplx> work_u_;
  std::vector<cplx> work_d_;
};

RingFields step(RingFields fields, double dt, const RingParams& params);

struct Observables {
  double norm_u = 0.0;
  double norm_d = 0.0;
  double energy = 0.0;
  double angular_momentum_u = 0.0;
  double angular_momentum_d = 0.0;
};

Observables measure(const RingFields& fields, const RingParams& params);

// |alpha| of mode +m and -m in both rings.
struct ModeTrack {
  int m = 0;
  std::vector<double> up_plus;
  std::vector<double> down_plus;
  std::vector<double> up_minus;
  std::vector<double> down_minus;
};

struct EvolutionRecord {
  std::vector<double> tau;
  std::vector<double> norm_u;
  std::vector<double> norm_d;
  std::vector<double> energy;
  std::vector<double> angular_momentum_u;
  std::vector<double> angular_momentum_d;
  std::vector<ModeTrack> modes;
  // |alpha_0| of the uniform background, sqrt(n0).
  double background_alpha = 1.0;
  double seed_amplitude = 0.0;

  const ModeTrack& track(int m) const;
};

// Advances fields in place by n_steps, sampling at step 0 and every
// record_every steps (and at the final step).
EvolutionRecord evolve(RingFields& fields, double dt, long n_steps, const RingParams& params,
                       int record_every, const std::vector<int>& modes_to_track);

class NoGrowthWindow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GrowthFit {
  double rate = 0.0;
  double tau_begin = 0.0;
  double tau_end = 0.0;
  // RMS deviation of ln(amplitude) from the fitted line.
  double residual = 0.0;
  int samples = 0;
};

// Least-squares slope of ln A(tau), with A the RMS of |alpha_{+-m}| over both rings
// relative to the background, fitted where 10 * seed <= A <= 1e-2.
GrowthFit measure_growth_rate(const EvolutionRecord& record, int m);

}  // namespace ringbdg
