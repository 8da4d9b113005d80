#include <algorithm>

#include "nlsrep/kernels.hpp"

namespace nlsrep::kernels {
namespace {

// Four interleaved partial sums, matching the lane layout of the vector
// kernels so both paths round similarly on long arrays.
template <class Term>
double sum4(std::size_t n, Term term) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += term(i);
    acc[1] += term(i + 1);
    acc[2] += term(i + 2);
    acc[3] += term(i + 3);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += term(i);
  return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + tail;
}

inline double norm2(const cplx& z) { return z.real() * z.real() + z.imag() * z.imag(); }

double abs2_sum(const cplx* u, std::size_t n) {
  return sum4(n, [u](std::size_t i) { return norm2(u[i]); });
}

double weighted_abs2_sum(const cplx* u, const double* w, std::size_t n) {
  return sum4(n, [u, w](std::size_t i) { return w[i] * norm2(u[i]); });
}

double weighted_abs4_sum(const cplx* u, const double* w, std::size_t n) {
  return sum4(n, [u, w](std::size_t i) {
    const double a = norm2(u[i]);
    return w[i] * a * a;
  });
}

double max_abs2(const cplx* u, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, norm2(u[i]));
  return m;
}

double weighted_im_cross(const cplx* u, const cplx* v, const double* w, std::size_t n) {
  return sum4(n, [u, v, w](std::size_t i) {
    return w[i] * (u[i].real() * v[i].imag() - u[i].imag() * v[i].real());
  });
}

void mul_complex(cplx* u, const cplx* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = u[i].real(), b = u[i].imag();
    const double c = m[i].real(), d = m[i].imag();
    u[i] = cplx(a * c - b * d, a * d + b * c);
  }
}

void mul_real(cplx* u, const double* s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) u[i] = cplx(u[i].real() * s[i], u[i].imag() * s[i]);
}

void abs2(const cplx* u, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = norm2(u[i]);
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{
      "scalar",          abs2_sum,    weighted_abs2_sum, weighted_abs4_sum, max_abs2,
      weighted_im_cross, mul_complex, mul_real,          abs2,
  };
  return table;
}

}  // namespace nlsrep::kernels
