#pragma once

#include <span>
#include <vector>

namespace ringbdg {

// Symmetric tridiagonal matrix: diag[0..n), off[i] couples i and i+1.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  int size() const { return static_cast<int>(diag.size()); }
};

// Number of eigenvalues strictly below x (Sturm sequence / LDL^T inertia).
int sturm_count(const SymTridiagonal& t, double x);

// k-th smallest eigenvalue (k = 0 is the lowest), bisected to full precision.
double bisect_eigenvalue(const SymTridiagonal& t, int k);

// Eigenvector for an isolated eigenvalue by inverse iteration; unit 2-norm,
// sign chosen so the largest-magnitude component is positive.
std::vector<double> inverse_iteration(const SymTridiagonal& t, double eigenvalue,
                                      int iterations = 4);

// Solves a general tridiagonal system in place (Thomas algorithm, no pivoting).
// sub[i] multiplies x[i-1] in row i (sub[0] unused), super[i] multiplies x[i+1].
void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> super, std::span<double> rhs);

}  // namespace ringbdg
