#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ringbdg/ring_model.hpp"

namespace ringbdg {

enum class PotentialKind {
  kQuarticDoubleWell,  // h (xi^2 - xi0^2)^2
  kHarmonic,           // xi^2, validation preset
};

// Stationary 1D GP problem in trap units,
//   mu phi = [-d^2/dxi^2 + V(xi) + g |phi|^2] phi,   sum phi^2 dxi = 1,
// on xi in [-L, L] with Dirichlet ends.
struct DWellParams {
  double xi0 = 5.0;
  double h = 0.05;
  double g_tilde = 0.0;
  double half_length = 10.0;
  int n_grid = 2001;  // odd, so xi = 0 is a grid point
  PotentialKind potential = PotentialKind::kQuarticDoubleWell;

  // L = 2 xi0 with grid spacing ~0.01.
  static DWellParams standard(double xi0, double h, double g_tilde);

  double spacing() const { return 2.0 * half_length / (n_grid - 1); }
  int center() const { return (n_grid - 1) / 2; }
  double xi(int i) const { return (i - center()) * spacing(); }

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

double potential(double xi, const DWellParams& params);

enum class ImaginaryTimeScheme {
  // (1 + dtau H[phi_n]) phi_{n+1} = phi_n; fixed points solve the discrete GP equation exactly.
  kBackwardEuler,
  // Strang split-step with sine-transform kinetic propagator and the density frozen
  // over each step; fixed point biased by O(dtau^2).
  kStrangSplit,
};

struct SolveOptions {
  ImaginaryTimeScheme scheme = ImaginaryTimeScheme::kBackwardEuler;
  double dtau = 0.1;
  // Halve dtau whenever a step raises the energy.
  bool step_control = true;
  long max_iterations = 200000;
  int check_every = 10;
  double mu_tolerance = 1e-10;
  double residual_tolerance = 1e-8;
  double boundary_tolerance = 1e-8;
  bool auto_extend = true;
  int max_extensions = 8;
  // Warm start on the same grid spacing; padded with zeros if the grid is larger.
  std::optional<std::vector<double>> initial_guess;
};

struct DWellSolution {
  Parity parity = Parity::kSymmetric;
  DWellParams params;  // grid actually used (after any domain extension)
  std::vector<double> phi;
  double mu = 0.0;
  double energy = 0.0;
  double residual = 0.0;
  long iterations = 0;
  bool converged = false;
  double final_dtau = 0.0;
  int extensions = 0;

  double density_at_center() const { return phi[params.center()] * phi[params.center()]; }
  int sign_changes() const;
};

class NotConverged : public std::runtime_error {
 public:
  NotConverged(const std::string& what, DWellSolution partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const DWellSolution& partial() const { return partial_; }

 private:
  DWellSolution partial_;
};

class DomainTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// GP chemical potential and energy functional of a normalised sample vector.
struct Functionals {
  double mu = 0.0;
  double energy = 0.0;
  double residual = 0.0;
};
Functionals evaluate_functionals(const DWellParams& params, const std::vector<double>& phi);

// Lowest normalised stationary state in the given parity sector.
DWellSolution solve_stationary(const DWellParams& params, Parity parity,
                               const SolveOptions& options = {});

// Finite-difference (g ignored) reference: two lowest eigenvalues of the full
// Dirichlet matrix, plus the lowest eigenpair within each parity sector.
struct LinearSpectrum {
  std::array<double, 2> lowest{};
  double symmetric_value = 0.0;
  double antisymmetric_value = 0.0;
  std::vector<double> symmetric_vector;      // full grid, sum phi^2 dxi = 1
  std::vector<double> antisymmetric_vector;  // full grid, sum phi^2 dxi = 1
};

LinearSpectrum linear_oracle(const DWellParams& params);

struct Splitting {
  double delta_energy = 0.0;  // E_A - E_S
  double delta_mu = 0.0;      // mu_A - mu_S
  DWellSolution symmetric;
  DWellSolution antisymmetric;
};

// Solves both parities on a common grid.
Splitting delta_as(const DWellParams& params, const SolveOptions& options = {},
                   const std::optional<std::vector<double>>& symmetric_guess = std::nullopt,
                   const std::optional<std::vector<double>>& antisymmetric_guess = std::nullopt);

struct SplittingRow {
  double g_tilde = 0.0;
  double energy_s = 0.0;
  double energy_a = 0.0;
  double delta_energy = 0.0;
  double mu_s = 0.0;
  double mu_a = 0.0;
  double delta_mu = 0.0;
  double center_density_s = 0.0;
  double half_length = 0.0;
  bool ok = false;
  std::string error;
};

struct SplittingCurve {
  DWellParams base;
  std::vector<SplittingRow> rows;  // ascending g

  bool all_ok() const;
};

// One delta_as per g, each warm-started from its neighbour's solution. With
// reverse_warm_start the chain runs from the largest g down; rows stay ascending.
SplittingCurve sweep_g(const DWellParams& params, const std::vector<double>& g_values,
                       const SolveOptions& options = {}, bool reverse_warm_start = false);

}  // namespace ringbdg
