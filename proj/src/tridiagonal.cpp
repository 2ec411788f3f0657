#include "ringbdg/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ringbdg {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double pivot_floor(const SymTridiagonal& t) {
  double emax = 0.0;
  for (double e : t.off) emax = std::max(emax, e * e);
  return std::max(std::numeric_limits<double>::min(), emax * std::numeric_limits<double>::min());
}

}  // namespace

int sturm_count(const SymTridiagonal& t, double x) {
  const int n = t.size();
  if (n == 0) return 0;
  const double pivmin = pivot_floor(t);
  int count = 0;
  double q = t.diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0) ++count;
  for (int i = 1; i < n; ++i) {
    q = (t.diag[i] - x) - t.off[i - 1] * t.off[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

double bisect_eigenvalue(const SymTridiagonal& t, int k) {
  const int n = t.size();
  if (k < 0 || k >= n) throw std::out_of_range("bisect_eigenvalue: index out of range");

  // Gershgorin interval.
  double lo = std::numeric_limits<double>::max();
  double hi = std::numeric_limits<double>::lowest();
  for (int i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(t.off[i]) : 0.0);
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  const double span = std::max(std::abs(lo), std::abs(hi));
  lo -= 2.0 * kEps * span + pivot_floor(t);
  hi += 2.0 * kEps * span + pivot_floor(t);

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(t, mid) > k)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> super, std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (n == 0) return;
  std::vector<double> c(n);
  double denom = diag[0];
  c[0] = n > 1 ? super[0] / denom : 0.0;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - sub[i] * c[i - 1];
    c[i] = i + 1 < n ? super[i] / denom : 0.0;
    rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

std::vector<double> inverse_iteration(const SymTridiagonal& t, double eigenvalue, int iterations) {
  const int n = t.size();
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(t.diag[i]));
  // Shift just off the eigenvalue so the factorisation stays finite.
  const double shift = eigenvalue - 1e3 * kEps * std::max(scale, 1.0);

  std::vector<double> sub(n, 0.0), diag(n), super(n, 0.0);
  for (int i = 0; i < n; ++i) {
    diag[i] = t.diag[i] - shift;
    if (i > 0) sub[i] = t.off[i - 1];
    if (i + 1 < n) super[i] = t.off[i];
  }

  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = 1.0 + 0.25 * std::sin(0.7 * i);  // generic start
  for (int it = 0; it < iterations; ++it) {
    solve_tridiagonal(sub, diag, super, x);
    double norm = 0.0;
    for (double v : x) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
  }
  const auto big = std::max_element(x.begin(), x.end(),
                                    [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (*big < 0)
    for (double& v : x) v = -v;
  return x;
}

}  // namespace ringbdg
