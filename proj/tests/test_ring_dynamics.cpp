#include <doctest.h>

#include <cmath>
#include <limits>

#include "ringbdg/ring_dynamics.hpp"

using namespace ringbdg;

namespace {

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

RingFields smooth_state(const RingGrid& grid) {
  RingFields f{grid, std::vector<cplx>(grid.size()), std::vector<cplx>(grid.size())};
  for (int j = 0; j < grid.size(); ++j) {
    const double p = grid.angle(j);
    f.chi_u[j] = cplx(1.0 + 0.3 * std::cos(p), 0.1 * std::sin(3 * p));
    f.chi_d[j] = cplx(0.5, 0.2 * std::sin(2 * p));
  }
  return f;
}

RingFields advance(RingFields f, const RingParams& p, double dt, long steps) {
  RingPropagator prop(p, f.grid, dt);
  for (long s = 0; s < steps; ++s) prop.step(f);
  return f;
}

double state_error(const RingFields& a, const RingFields& b) {
  return std::max(max_diff(a.chi_u, b.chi_u), max_diff(a.chi_d, b.chi_d));
}

}  // namespace

TEST_CASE("grid indexing") {
  RingGrid g(32);
  CHECK(g.mode_of_slot(0) == 0);
  CHECK(g.mode_of_slot(15) == 15);
  CHECK(g.mode_of_slot(16) == -16);
  CHECK(g.mode_of_slot(31) == -1);
  for (int m = -16; m < 16; ++m) CHECK(g.mode_of_slot(g.slot_of_mode(m)) == m);
  CHECK_THROWS_AS(RingGrid(24), std::invalid_argument);
  CHECK_THROWS_AS(RingGrid(8), std::invalid_argument);
}

TEST_CASE("uniform preparation and its Fourier content") {
  RingParams p;
  p.n0 = 3.0;
  p.gamma = 1.0;
  const RingGrid g(64);
  for (Parity par : {Parity::kSymmetric, Parity::kAntisymmetric}) {
    const auto f = prepare_uniform(p, par, g);
    const auto au = fourier_amplitudes(f, Ring::kUp);
    const auto ad = fourier_amplitudes(f, Ring::kDown);
    CHECK(std::abs(au[0] - std::sqrt(3.0)) < 1e-13);
    CHECK(std::abs(ad[0] - parity_sign(par) * std::sqrt(3.0)) < 1e-13);
    for (int k = 1; k < 64; ++k) CHECK(std::abs(au[k]) < 1e-13);
    const auto obs = measure(f, p);
    CHECK(obs.norm_u == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(obs.norm_d == doctest::Approx(3.0).epsilon(1e-14));
  }
}

TEST_CASE("energy of a uniform state") {
  for (int sign : {-1, 1}) {
    for (Parity par : {Parity::kSymmetric, Parity::kAntisymmetric}) {
      RingParams p;
      p.n0 = 2.0;
      p.gamma = 0.7;
      p.kappa_mag = 0.4;
      p.kappa_sign = sign;
      const auto f = prepare_uniform(p, par, RingGrid(32));
      const double expected = 2.0 * parity_sign(par) * p.kappa() * p.n0 + p.gamma * p.n0 * p.n0 / kTwoPi;
      CHECK(measure(f, p).energy == doctest::Approx(expected).epsilon(1e-13));
    }
  }
}

TEST_CASE("noise seeding is deterministic and has the stated spread") {
  const auto p = RingParams::from_epsilon(1.0, 0.5, -1);
  const RingGrid g(1024);
  const auto base = prepare_uniform(p, Parity::kSymmetric, g);
  const auto a = seed_noise(base, 1e-3, 42);
  const auto b = seed_noise(base, 1e-3, 42);
  const auto c = seed_noise(base, 1e-3, 43);
  CHECK(a.chi_u == b.chi_u);
  CHECK(a.chi_d == b.chi_d);
  CHECK(a.chi_u != c.chi_u);
  CHECK(a.seed_amplitude == 1e-3);
  CHECK(seed_noise(base, 0.0, 1).chi_u == base.chi_u);
  CHECK_THROWS_AS(seed_noise(base, -1.0, 1), std::invalid_argument);

  // alpha_m = sqrt(2 pi) * c_m, so |alpha_m|^2 / n0 averages 2 * amplitude^2.
  for (Ring r : {Ring::kUp, Ring::kDown}) {
    const auto alpha = fourier_amplitudes(a, r);
    CHECK(std::abs(std::abs(alpha[0]) - std::sqrt(p.n0)) < 1e-12);
    double mean = 0.0;
    for (int k = 1; k < g.size(); ++k) mean += std::norm(alpha[k]) / p.n0;
    mean /= g.size() - 1;
    CHECK(mean == doctest::Approx(2e-6).epsilon(0.1));
  }
}

TEST_CASE("free propagation of a plane wave is exact") {
  RingParams p;
  p.gamma = 0.0;
  p.kappa_mag = 0.0;
  const RingGrid g(64);
  RingFields f{g, std::vector<cplx>(64), std::vector<cplx>(64, 0.0)};
  for (int j = 0; j < 64; ++j) f.chi_u[j] = std::polar(1.0, 3.0 * g.angle(j));
  const auto start = f.chi_u;
  const double tau = 0.73;
  f = advance(f, p, tau / 100, 100);
  for (int j = 0; j < 64; ++j) CHECK(std::abs(f.chi_u[j] - start[j] * std::polar(1.0, -9.0 * tau)) < 1e-12);
}

TEST_CASE("linear tunnelling returns the population after pi / |kappa|") {
  RingParams p;
  p.gamma = 0.0;
  p.kappa_mag = 0.8;
  const RingGrid g(32);
  RingFields f{g, std::vector<cplx>(32, 1.0), std::vector<cplx>(32, 0.0)};
  const long steps = 1000;
  const double half = kPi / (2 * p.kappa_mag);
  auto mid = advance(f, p, half / steps, steps);
  CHECK(measure(mid, p).norm_u < 1e-12);
  CHECK(measure(mid, p).norm_d == doctest::Approx(kTwoPi).epsilon(1e-12));
  auto full = advance(mid, p, half / steps, steps);
  CHECK(std::abs(full.chi_u[0] + 1.0) < 1e-12);  // exp(-i kappa sigma_x pi/|kappa|) = -1
  CHECK(std::abs(full.chi_d[0]) < 1e-12);
}

TEST_CASE("stationary uniform states only acquire the phase exp(-i mu tau)") {
  for (Parity par : {Parity::kSymmetric, Parity::kAntisymmetric}) {
    const auto p = RingParams::from_epsilon(2.0, 1.5, -1);
    auto f = prepare_uniform(p, par, RingGrid(64));
    const auto start = f;
    const double tau = 1.0;
    f = advance(f, p, 1e-3, 1000);
    const cplx phase = std::polar(1.0, -uniform_mu(p, par) * tau);
    for (int j = 0; j < 64; ++j) {
      CHECK(std::abs(f.chi_u[j] - start.chi_u[j] * phase) < 1e-11);
      CHECK(std::abs(f.chi_d[j] - start.chi_d[j] * phase) < 1e-11);
    }
  }
}

TEST_CASE("linear dynamics conserves norm and energy to roundoff") {
  RingParams p;
  p.gamma = 0.0;
  p.kappa_mag = 0.9;
  const RingGrid g(64);
  auto f = smooth_state(g);
  const auto before = measure(f, p);
  f = advance(f, p, 1e-2, 500);
  const auto after = measure(f, p);
  const double n0 = before.norm_u + before.norm_d;
  CHECK(std::abs(after.norm_u + after.norm_d - n0) / n0 < 1e-12);
  CHECK(std::abs(after.energy - before.energy) / std::abs(before.energy) < 1e-12);
}

TEST_CASE("the splitting is second order") {
  const auto p = RingParams::from_epsilon(1.5, 0.7, -1);
  const RingGrid g(64);
  const auto f0 = smooth_state(g);
  const double tau = 1.0;
  const auto ref = advance(f0, p, tau / 6400, 6400);
  const double e1 = state_error(advance(f0, p, tau / 50, 50), ref);
  const double e2 = state_error(advance(f0, p, tau / 100, 100), ref);
  const double e3 = state_error(advance(f0, p, tau / 200, 200), ref);
  const double order1 = std::log2(e1 / e2);
  const double order2 = std::log2(e2 / e3);
  CHECK(order1 == doctest::Approx(2.0).epsilon(0.05));
  CHECK(order2 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("flipping the coupling sign is the gauge map chi_d -> -chi_d") {
  auto p = RingParams::from_epsilon(2.0, 1.5, -1);
  auto f = seed_noise(prepare_uniform(p, Parity::kAntisymmetric, RingGrid(128)), 1e-3, 9);
  auto q = p;
  q.kappa_sign = +1;
  auto mapped = f;
  for (auto& z : mapped.chi_d) z = -z;
  const auto a = advance(f, p, 1e-3, 1000);
  const auto b = advance(mapped, q, 1e-3, 1000);
  double d = 0.0;
  for (int j = 0; j < 128; ++j) {
    d = std::max(d, std::abs(a.chi_u[j] - b.chi_u[j]));
    d = std::max(d, std::abs(a.chi_d[j] + b.chi_d[j]));
  }
  CHECK(d < 1e-12);
}

TEST_CASE("angular momentum of a plane wave") {
  RingParams p;
  const RingGrid g(32);
  RingFields f{g, std::vector<cplx>(32), std::vector<cplx>(32)};
  for (int j = 0; j < 32; ++j) {
    f.chi_u[j] = std::polar(1.0, 2.0 * g.angle(j));
    f.chi_d[j] = std::polar(0.5, -1.0 * g.angle(j));
  }
  const auto obs = measure(f, p);
  CHECK(obs.angular_momentum_u == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(obs.angular_momentum_d == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("non-finite fields raise BlowUpError") {
  const auto p = RingParams::from_epsilon(1.0, 0.2, -1);
  auto f = prepare_uniform(p, Parity::kSymmetric, RingGrid(16));
  f.chi_u[3] = std::numeric_limits<double>::quiet_NaN();
  RingPropagator prop(p, f.grid, 1e-3);
  CHECK_THROWS_AS(prop.step(f), BlowUpError);
}

TEST_CASE("modulational growth rate matches Im omega1") {
  const auto p = RingParams::from_epsilon(-1.0, 0.0, -1);
  auto f = seed_noise(prepare_uniform(p, Parity::kSymmetric, RingGrid(64)), 1e-4, 3);
  const auto rec = evolve(f, 1e-3, 8000, p, 10, {1, 2});
  const auto fit = measure_growth_rate(rec, 1);
  CHECK(fit.rate == doctest::Approx(1.0).epsilon(0.05));
  CHECK(fit.samples >= 3);
  CHECK(fit.tau_begin < fit.tau_end);
  CHECK_THROWS_AS(rec.track(5), std::out_of_range);
}

TEST_CASE("the antisymmetric state grows at the predicted rate and counter-rotates") {
  const auto p = RingParams::from_epsilon(2.0, 1.5, -1);
  auto f = seed_noise(prepare_uniform(p, Parity::kAntisymmetric, RingGrid(64)), 1e-4, 5);
  const auto rec = evolve(f, 1e-3, 6000, p, 10, {1});
  CHECK(measure_growth_rate(rec, 1).rate == doctest::Approx(2.0).epsilon(0.05));
  // The rings exchange angular momentum with opposite signs; the total is conserved
  // up to aliasing of the broadband seed.
  auto ring_l = [&](std::size_t i, bool up) {
    return up ? rec.angular_momentum_u[i] * rec.norm_u[i] : rec.angular_momentum_d[i] * rec.norm_d[i];
  };
  const double total0 = ring_l(0, true) + ring_l(0, false);
  std::size_t peak = 0;
  double drift = 0.0;
  for (std::size_t i = 0; i < rec.tau.size(); ++i) {
    drift = std::max(drift, std::abs(ring_l(i, true) + ring_l(i, false) - total0));
    if (std::abs(ring_l(i, true)) > std::abs(ring_l(peak, true))) peak = i;
  }
  MESSAGE("peak ring angular momentum " << ring_l(peak, true) << ", total drift " << drift);
  CHECK(drift < 1e-2 * std::abs(ring_l(peak, true)));
  CHECK(std::abs(ring_l(peak, true)) > 20 * std::abs(total0));
  CHECK(ring_l(peak, true) * ring_l(peak, false) < 0.0);
}

TEST_CASE("a stable background never leaves the noise floor") {
  const auto p = RingParams::from_epsilon(2.0, 1.5, -1);
  auto f = seed_noise(prepare_uniform(p, Parity::kSymmetric, RingGrid(64)), 1e-4, 5);
  const auto rec = evolve(f, 1e-3, 5000, p, 10, {1, 2, 3});
  for (int m : {1, 2, 3}) CHECK_THROWS_AS(measure_growth_rate(rec, m), NoGrowthWindow);

  auto clean = prepare_uniform(p, Parity::kAntisymmetric, RingGrid(64));
  const auto rec0 = evolve(clean, 1e-3, 10, p, 1, {1});
  CHECK_THROWS_AS(measure_growth_rate(rec0, 1), NoGrowthWindow);
}

TEST_CASE("evolve records the requested schedule") {
  const auto p = RingParams::from_epsilon(1.0, 0.5, -1);
  auto f = prepare_uniform(p, Parity::kSymmetric, RingGrid(16));
  const auto rec = evolve(f, 0.01, 25, p, 10, {});
  REQUIRE(rec.tau.size() == 4);
  CHECK(rec.tau[0] == 0.0);
  CHECK(rec.tau[3] == doctest::Approx(0.25));
  CHECK_THROWS_AS(evolve(f, 0.01, 5, p, 0, {}), std::invalid_argument);
  CHECK_THROWS_AS(RingPropagator(p, f.grid, 0.0), std::invalid_argument);
}
