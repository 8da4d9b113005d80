// Compiled with -mavx2 -mfma. Nothing here may run before the dispatcher has
// confirmed CPU support.

#include <immintrin.h>

#include <algorithm>

#include "nlsrep/kernels.hpp"

namespace nlsrep::kernels {
namespace {

inline double norm2(const cplx& z) { return z.real() * z.real() + z.imag() * z.imag(); }

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline const double* as_doubles(const cplx* u) { return reinterpret_cast<const double*>(u); }
inline double* as_doubles(cplx* u) { return reinterpret_cast<double*>(u); }

// |u_i|^2 for four consecutive values, returned in order i..i+3.
inline __m256d abs2x4(const cplx* u) {
  const __m256d a = _mm256_loadu_pd(as_doubles(u));
  const __m256d b = _mm256_loadu_pd(as_doubles(u + 2));
  const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
  // hadd interleaves: [0, 2, 1, 3]
  return _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
}

double abs2_sum(const cplx* u, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(as_doubles(u + i));
    const __m256d b = _mm256_loadu_pd(as_doubles(u + i + 2));
    acc0 = _mm256_fmadd_pd(a, a, acc0);
    acc1 = _mm256_fmadd_pd(b, b, acc1);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += norm2(u[i]);
  return hsum(_mm256_add_pd(acc0, acc1)) + tail;
}

double weighted_abs2_sum(const cplx* u, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), abs2x4(u + i), acc);
  double tail = 0.0;
  for (; i < n; ++i) tail += w[i] * norm2(u[i]);
  return hsum(acc) + tail;
}

double weighted_abs4_sum(const cplx* u, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a2 = abs2x4(u + i);
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), a2), a2, acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) {
    const double a = norm2(u[i]);
    tail += w[i] * a * a;
  }
  return hsum(acc) + tail;
}

double max_abs2(const cplx* u, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, abs2x4(u + i));
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, m);
  double out = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
  for (; i < n; ++i) out = std::max(out, norm2(u[i]));
  return out;
}

double weighted_im_cross(const cplx* u, const cplx* v, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ua = _mm256_loadu_pd(as_doubles(u + i));
    const __m256d ub = _mm256_loadu_pd(as_doubles(u + i + 2));
    const __m256d va = _mm256_permute_pd(_mm256_loadu_pd(as_doubles(v + i)), 0b0101);
    const __m256d vb = _mm256_permute_pd(_mm256_loadu_pd(as_doubles(v + i + 2)), 0b0101);
    // [re*vi, im*vr] pairs; hsub gives Im(conj(u) v) in order [0, 2, 1, 3].
    const __m256d im = _mm256_hsub_pd(_mm256_mul_pd(ua, va), _mm256_mul_pd(ub, vb));
    const __m256d ww = _mm256_permute4x64_pd(_mm256_loadu_pd(w + i), _MM_SHUFFLE(3, 1, 2, 0));
    acc = _mm256_fmadd_pd(ww, im, acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += w[i] * (u[i].real() * v[i].imag() - u[i].imag() * v[i].real());
  return hsum(acc) + tail;
}

void mul_complex(cplx* u, const cplx* m, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(as_doubles(u + i));
    const __m256d b = _mm256_loadu_pd(as_doubles(m + i));
    const __m256d br = _mm256_movedup_pd(b);
    const __m256d bi = _mm256_permute_pd(b, 0b1111);
    const __m256d as = _mm256_permute_pd(a, 0b0101);
    _mm256_storeu_pd(as_doubles(u + i), _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(as, bi)));
  }
  for (; i < n; ++i) {
    const double a = u[i].real(), b = u[i].imag();
    const double c = m[i].real(), d = m[i].imag();
    u[i] = cplx(a * c - b * d, a * d + b * c);
  }
}

void mul_real(cplx* u, const double* s, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d ss =
        _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(s + i)), _MM_SHUFFLE(1, 1, 0, 0));
    _mm256_storeu_pd(as_doubles(u + i), _mm256_mul_pd(_mm256_loadu_pd(as_doubles(u + i)), ss));
  }
  for (; i < n; ++i) u[i] = cplx(u[i].real() * s[i], u[i].imag() * s[i]);
}

void abs2(const cplx* u, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, abs2x4(u + i));
  for (; i < n; ++i) out[i] = norm2(u[i]);
}

}  // namespace

namespace detail {
const KernelTable& avx2_table_unchecked() noexcept {
  static const KernelTable table{
      "avx2",            abs2_sum,    weighted_abs2_sum, weighted_abs4_sum, max_abs2,
      weighted_im_cross, mul_complex, mul_real,          abs2,
  };
  return table;
}
}  // namespace detail

}  // namespace nlsrep::kernels
