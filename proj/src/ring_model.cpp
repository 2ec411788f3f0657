#include "ringbdg/ring_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ringbdg {

std::string_view to_string(Parity p) {
  return p == Parity::kSymmetric ? "symmetric" : "antisymmetric";
}

Parity parse_parity(std::string_view text) {
  if (text == "symmetric" || text == "s" || text == "S") return Parity::kSymmetric;
  if (text == "antisymmetric" || text == "a" || text == "A") return Parity::kAntisymmetric;
  throw std::invalid_argument("parity: expected \"symmetric\" or \"antisymmetric\", got \"" +
                              std::string(text) + "\"");
}

RingParams RingParams::from_epsilon(double eps, double kappa_mag, int kappa_sign) {
  RingParams p;
  p.kappa_mag = kappa_mag;
  p.kappa_sign = kappa_sign;
  p.n0 = kTwoPi;
  p.gamma = eps;
  return p;
}

void RingParams::validate() const {
  if (!std::isfinite(kappa_mag) || kappa_mag < 0.0)
    throw std::invalid_argument("kappa_mag: must be finite and >= 0");
  if (kappa_sign != -1 && kappa_sign != 1)
    throw std::invalid_argument("kappa_sign: must be -1 or +1");
  if (!std::isfinite(gamma)) throw std::invalid_argument("gamma: must be finite");
  if (!std::isfinite(n0) || n0 <= 0.0) throw std::invalid_argument("n0: must be finite and > 0");
}

double epsilon(const RingParams& params) { return params.gamma * params.n0 / kTwoPi; }

double uniform_mu(const RingParams& params, Parity parity) {
  return epsilon(params) + parity_sign(parity) * params.kappa();
}

UniformState uniform_state(const RingParams& params, Parity parity) {
  return UniformState{parity, uniform_mu(params, parity), {std::sqrt(params.n0), 0.0}};
}

StationaryPair stationary_states(const RingParams& params) {
  // Negative kappa favours the symmetric superposition, positive the antisymmetric one.
  const Parity ground = params.kappa_sign < 0 ? Parity::kSymmetric : Parity::kAntisymmetric;
  return {uniform_state(params, ground), uniform_state(params, opposite(ground))};
}

}  // namespace ringbdg
