#include "ringbdg/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <new>
#include <stdexcept>
#include <utility>

namespace ringbdg {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

ComplexFft::ComplexFft(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("ComplexFft: size must be positive");
  buffer_ = static_cast<std::complex<double>*>(fftw_malloc(sizeof(std::complex<double>) * n));
  if (buffer_ == nullptr) throw std::bad_alloc();
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_1d(n, as_fftw(buffer_), as_fftw(buffer_), FFTW_FORWARD, FFTW_ESTIMATE);
  backward_plan_ = fftw_plan_dft_1d(n, as_fftw(buffer_), as_fftw(buffer_), FFTW_BACKWARD, FFTW_ESTIMATE);
  if (forward_plan_ == nullptr || backward_plan_ == nullptr) {
    release();
    throw std::runtime_error("ComplexFft: FFTW planning failed");
  }
}

ComplexFft::~ComplexFft() { release(); }

ComplexFft::ComplexFft(ComplexFft&& other) noexcept
    : n_(std::exchange(other.n_, 0)),
      buffer_(std::exchange(other.buffer_, nullptr)),
      forward_plan_(std::exchange(other.forward_plan_, nullptr)),
      backward_plan_(std::exchange(other.backward_plan_, nullptr)) {}

ComplexFft& ComplexFft::operator=(ComplexFft&& other) noexcept {
  if (this != &other) {
    release();
    n_ = std::exchange(other.n_, 0);
    buffer_ = std::exchange(other.buffer_, nullptr);
    forward_plan_ = std::exchange(other.forward_plan_, nullptr);
    backward_plan_ = std::exchange(other.backward_plan_, nullptr);
  }
  return *this;
}

void ComplexFft::release() noexcept {
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
  if (buffer_) fftw_free(buffer_);
  forward_plan_ = backward_plan_ = nullptr;
  buffer_ = nullptr;
}

void ComplexFft::forward(std::span<const std::complex<double>> in,
                         std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.end(), buffer_);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  std::copy(buffer_, buffer_ + n_, out.begin());
}

void ComplexFft::backward(std::span<const std::complex<double>> in,
                          std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.end(), buffer_);
  fftw_execute(static_cast<fftw_plan>(backward_plan_));
  std::copy(buffer_, buffer_ + n_, out.begin());
}

SineTransform::SineTransform(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("SineTransform: size must be positive");
  buffer_ = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  if (buffer_ == nullptr) throw std::bad_alloc();
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_r2r_1d(n, buffer_, buffer_, FFTW_RODFT00, FFTW_ESTIMATE);
  if (plan_ == nullptr) {
    fftw_free(buffer_);
    throw std::runtime_error("SineTransform: FFTW planning failed");
  }
}

SineTransform::~SineTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(buffer_);
}

void SineTransform::apply(std::span<double> data) {
  std::copy(data.begin(), data.end(), buffer_);
  fftw_execute(static_cast<fftw_plan>(plan_));
  std::copy(buffer_, buffer_ + n_, data.begin());
}

}  // namespace ringbdg
