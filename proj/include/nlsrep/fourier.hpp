#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nlsrep {

/// In-place complex DFT over a d-dimensional cube of n^d points. Backed by
/// FFTW with estimate-mode plans, so the same input always produces the same
/// bits. Executing a plan is thread-safe; construction is serialized
/// internally.
class Fourier {
 public:
  Fourier(int d, std::size_t n);
  ~Fourier();
  Fourier(const Fourier&) = delete;
  Fourier& operator=(const Fourier&) = delete;

  std::size_t size() const noexcept { return total_; }

  /// Unnormalized forward transform.
  void forward(std::span<std::complex<double>> data) const;
  /// Inverse transform, scaled by 1/N so that inverse(forward(x)) == x.
  void inverse(std::span<std::complex<double>> data) const;

 private:
  struct Plans;
  std::size_t total_;
  Plans* plans_;
};

}  // namespace nlsrep
