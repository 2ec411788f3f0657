#include "ringbdg/ring_dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace ringbdg {
namespace {

// SplitMix64 finaliser; used as a counter-based generator keyed by the seed.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Uniform on (0, 1].
double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  const std::uint64_t bits = mix64(mix64(seed) ^ (counter * 0xD1B54A32D192ED03ULL));
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

cplx counter_gaussian(std::uint64_t seed, std::uint64_t stream) {
  const double u1 = counter_uniform(seed, 2 * stream);
  const double u2 = counter_uniform(seed, 2 * stream + 1);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return std::polar(r, kTwoPi * u2);
}

bool all_finite(const std::vector<cplx>& v) {
  return std::all_of(v.begin(), v.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

double sum_norm(const std::vector<cplx>& v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

}  // namespace

RingGrid::RingGrid(int n_points) : n_(n_points) {
  if (n_points < 16 || !std::has_single_bit(static_cast<unsigned>(n_points)))
    throw std::invalid_argument("n_points: must be a power of two >= 16");
}

int RingGrid::slot_of_mode(int m) const {
  if (m < -n_ / 2 || m >= n_ / 2) throw std::out_of_range("mode index outside the grid band");
  return m >= 0 ? m : m + n_;
}

std::vector<cplx> fourier_amplitudes(const RingFields& fields, Ring ring) {
  const int n = fields.grid.size();
  std::vector<cplx> alpha(n);
  ComplexFft fft(n);
  fft.forward(fields.ring(ring), alpha);
  const double scale = std::sqrt(kTwoPi) / n;
  for (auto& a : alpha) a *= scale;
  return alpha;
}

RingFields prepare_uniform(const RingParams& params, Parity parity, const RingGrid& grid) {
  params.validate();
  const double amp = std::sqrt(params.n0 / kTwoPi);
  RingFields f{grid, std::vector<cplx>(grid.size(), amp),
               std::vector<cplx>(grid.size(), parity_sign(parity) * amp)};
  f.background = amp;
  return f;
}

RingFields seed_noise(RingFields fields, double amplitude, std::uint64_t seed) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw std::invalid_argument("noise amplitude: must be finite and >= 0");
  if (amplitude == 0.0) return fields;

  const int n = fields.grid.size();
  const double sigma = amplitude * fields.background;
  ComplexFft fft(n);
  std::vector<cplx> coeff(n);
  std::vector<cplx> delta(n);
  for (int r = 0; r < 2; ++r) {
    coeff.assign(n, 0.0);
    for (int k = 1; k < n; ++k) {
      const auto stream = static_cast<std::uint64_t>(r) * static_cast<std::uint64_t>(n) + k;
      coeff[k] = sigma * counter_gaussian(seed, stream);
    }
    // chi(phi_j) += sum_m c_m exp(i m phi_j)
    fft.backward(coeff, delta);
    auto& chi = r == 0 ? fields.chi_u : fields.chi_d;
    for (int j = 0; j < n; ++j) chi[j] += delta[j];
  }
  fields.seed_amplitude = std::hypot(fields.seed_amplitude, amplitude);
  return fields;
}

RingPropagator::RingPropagator(const RingParams& params, const RingGrid& grid, double dt)
    : params_(params), n_(grid.size()), dt_(dt), fft_(grid.size()) {
  params.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt: must be finite and > 0");
  kinetic_phase_.resize(n_);
  for (int k = 0; k < n_; ++k) {
    const double m = grid.mode_of_slot(k);
    kinetic_phase_[k] = std::polar(1.0 / n_, -m * m * dt);
  }
  // exp(-i kappa sigma_x dt) = cos(kappa dt) - i sin(kappa dt) sigma_x
  tunnel_cos_ = std::cos(params.kappa() * dt);
  tunnel_sin_ = std::sin(params.kappa() * dt);
  work_u_.resize(n_);
  work_d_.resize(n_);
}

void RingPropagator::nonlinear_half(std::vector<cplx>& chi) const {
  const double c = -0.5 * params_.gamma * dt_;
  for (auto& z : chi) z *= std::polar(1.0, c * std::norm(z));
}

void RingPropagator::step(RingFields& fields) {
  if (fields.grid.size() != n_) throw std::invalid_argument("step: grid size mismatch");
  nonlinear_half(fields.chi_u);
  nonlinear_half(fields.chi_d);

  fft_.forward(fields.chi_u, work_u_);
  fft_.forward(fields.chi_d, work_d_);
  const cplx mix(0.0, -tunnel_sin_);
  for (int k = 0; k < n_; ++k) {
    const cplx a = work_u_[k];
    const cplx b = work_d_[k];
    work_u_[k] = kinetic_phase_[k] * (tunnel_cos_ * a + mix * b);
    work_d_[k] = kinetic_phase_[k] * (tunnel_cos_ * b + mix * a);
  }
  fft_.backward(work_u_, fields.chi_u);
  fft_.backward(work_d_, fields.chi_d);

  nonlinear_half(fields.chi_u);
  nonlinear_half(fields.chi_d);
  fields.tau += dt_;

  if (!all_finite(fields.chi_u) || !all_finite(fields.chi_d)) {
    std::ostringstream msg;
    msg << "non-finite field value at tau=" << fields.tau << "; reduce dt";
    throw BlowUpError(msg.str(), fields.tau);
  }
}

RingFields step(RingFields fields, double dt, const RingParams& params) {
  RingPropagator prop(params, fields.grid, dt);
  prop.step(fields);
  return fields;
}

Observables measure(const RingFields& fields, const RingParams& params) {
  const int n = fields.grid.size();
  const double w = kTwoPi / n;
  const auto alpha_u = fourier_amplitudes(fields, Ring::kUp);
  const auto alpha_d = fourier_amplitudes(fields, Ring::kDown);

  Observables obs;
  double kinetic = 0.0;
  double lu = 0.0;
  double ld = 0.0;
  for (int k = 0; k < n; ++k) {
    const double m = fields.grid.mode_of_slot(k);
    const double pu = std::norm(alpha_u[k]);
    const double pd = std::norm(alpha_d[k]);
    kinetic += m * m * (pu + pd);
    lu += m * pu;
    ld += m * pd;
  }
  double tunnel = 0.0;
  double interaction = 0.0;
  for (int j = 0; j < n; ++j) {
    const cplx u = fields.chi_u[j];
    const cplx d = fields.chi_d[j];
    tunnel += 2.0 * (std::conj(u) * d).real();
    interaction += std::norm(u) * std::norm(u) + std::norm(d) * std::norm(d);
  }
  obs.norm_u = w * sum_norm(fields.chi_u);
  obs.norm_d = w * sum_norm(fields.chi_d);
  obs.energy = kinetic + w * (params.kappa() * tunnel + 0.5 * params.gamma * interaction);
  obs.angular_momentum_u = lu / sum_norm(alpha_u);
  obs.angular_momentum_d = ld / sum_norm(alpha_d);
  return obs;
}

const ModeTrack& EvolutionRecord::track(int m) const {
  for (const auto& t : modes)
    if (t.m == m) return t;
  throw std::out_of_range("mode " + std::to_string(m) + " was not tracked");
}

EvolutionRecord evolve(RingFields& fields, double dt, long n_steps, const RingParams& params,
                       int record_every, const std::vector<int>& modes_to_track) {
  if (n_steps < 0) throw std::invalid_argument("n_steps: must be >= 0");
  if (record_every < 1) throw std::invalid_argument("record_every: must be >= 1");
  for (int m : modes_to_track) fields.grid.slot_of_mode(-std::abs(m));

  RingPropagator prop(params, fields.grid, dt);
  EvolutionRecord rec;
  rec.background_alpha = std::sqrt(params.n0);
  rec.seed_amplitude = fields.seed_amplitude;
  for (int m : modes_to_track) rec.modes.push_back(ModeTrack{m, {}, {}, {}, {}});

  auto sample = [&]() {
    const auto obs = measure(fields, params);
    rec.tau.push_back(fields.tau);
    rec.norm_u.push_back(obs.norm_u);
    rec.norm_d.push_back(obs.norm_d);
    rec.energy.push_back(obs.energy);
    rec.angular_momentum_u.push_back(obs.angular_momentum_u);
    rec.angular_momentum_d.push_back(obs.angular_momentum_d);
    if (rec.modes.empty()) return;
    const auto au = fourier_amplitudes(fields, Ring::kUp);
    const auto ad = fourier_amplitudes(fields, Ring::kDown);
    for (auto& t : rec.modes) {
      const int kp = fields.grid.slot_of_mode(t.m);
      const int km = fields.grid.slot_of_mode(-t.m);
      t.up_plus.push_back(std::abs(au[kp]));
      t.down_plus.push_back(std::abs(ad[kp]));
      t.up_minus.push_back(std::abs(au[km]));
      t.down_minus.push_back(std::abs(ad[km]));
    }
  };

  sample();
  for (long s = 1; s <= n_steps; ++s) {
    prop.step(fields);
    if (s % record_every == 0 || s == n_steps) sample();
  }
  return rec;
}

GrowthFit measure_growth_rate(const EvolutionRecord& record, int m) {
  const auto& t = record.track(m);
  const std::size_t n = record.tau.size();
  std::vector<double> amp(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = t.up_plus[i] * t.up_plus[i] + t.down_plus[i] * t.down_plus[i] +
                     t.up_minus[i] * t.up_minus[i] + t.down_minus[i] * t.down_minus[i];
    amp[i] = std::sqrt(0.25 * s) / record.background_alpha;
  }

  const double lo = 10.0 * record.seed_amplitude;
  const double hi = 1e-2;
  if (!(lo > 0.0) || lo >= hi)
    throw NoGrowthWindow("mode " + std::to_string(m) + ": seed amplitude leaves no fit window");
  if (n == 0 || amp[0] >= hi)
    throw NoGrowthWindow("mode " + std::to_string(m) + ": saturated from the start");

  // First exit through the upper bound, then back to the last sample below the lower one.
  std::size_t end = 0;
  while (end < n && amp[end] < hi) ++end;
  if (end == n)
    throw NoGrowthWindow("mode " + std::to_string(m) + ": amplitude never leaves the noise floor");
  std::size_t begin = end;
  while (begin > 0 && amp[begin - 1] >= lo) --begin;
  if (begin == 0)
    throw NoGrowthWindow("mode " + std::to_string(m) + ": no sample below the lower fit bound");

  // Samples strictly inside [lo, hi).
  const std::size_t count = end - begin;
  if (count < 3)
    throw NoGrowthWindow("mode " + std::to_string(m) + ": too few samples in the fit window");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = begin; i < end; ++i) {
    const double x = record.tau[i];
    const double y = std::log(amp[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double c = static_cast<double>(count);
  const double slope = (c * sxy - sx * sy) / (c * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / c;
  double ss = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double r = std::log(amp[i]) - (intercept + slope * record.tau[i]);
    ss += r * r;
  }
  return GrowthFit{slope, record.tau[begin], record.tau[end - 1], std::sqrt(ss / c),
                   static_cast<int>(count)};
}

}  // namespace ringbdg
