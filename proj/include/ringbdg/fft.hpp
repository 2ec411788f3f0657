#pragma once

#include <complex>
#include <span>

namespace ringbdg {

// Owns an FFTW plan pair and its aligned work buffers. Plans are built with
// FFTW_ESTIMATE so the transform is bitwise reproducible run to run.
// A ComplexFft is not safe for concurrent use; give each thread its own.
class ComplexFft {
 public:
  explicit ComplexFft(int n);
  ~ComplexFft();
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;
  ComplexFft(ComplexFft&& other) noexcept;
  ComplexFft& operator=(ComplexFft&& other) noexcept;

  int size() const { return n_; }

  // out_k = sum_j in_j exp(-2 pi i j k / n)
  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
  // out_j = sum_k in_k exp(+2 pi i j k / n), unnormalised
  void backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

 private:
  void release() noexcept;

  int n_ = 0;
  std::complex<double>* buffer_ = nullptr;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

// Type-I discrete sine transform (FFTW RODFT00) on n interior samples.
// Diagonalises the second-order finite-difference Laplacian with Dirichlet ends;
// applying it twice multiplies by 2 (n + 1).
class SineTransform {
 public:
  explicit SineTransform(int n);
  ~SineTransform();
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;

  int size() const { return n_; }
  void apply(std::span<double> data);

 private:
  int n_ = 0;
  double* buffer_ = nullptr;
  void* plan_ = nullptr;
};

}  // namespace ringbdg
