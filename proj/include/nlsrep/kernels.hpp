#pragma once

// Data-parallel inner loops used by the quadratures and the split-step
// propagator. Every kernel has a scalar reference implementation; on x86-64
// hosts with AVX2+FMA an intrinsic version is selected at first use.
// Setting NLSREP_KERNELS=scalar in the environment forces the reference path.
//
// Reductions accumulate in a fixed lane order, so a given table always
// returns the same bits for the same input. Scalar and AVX2 results agree to
// rounding, not bit for bit.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace nlsrep::kernels {

using cplx = std::complex<double>;

struct KernelTable {
  std::string_view name;
  /// sum |u_i|^2
  double (*abs2_sum)(const cplx* u, std::size_t n);
  /// sum w_i |u_i|^2
  double (*weighted_abs2_sum)(const cplx* u, const double* w, std::size_t n);
  /// sum w_i |u_i|^4
  double (*weighted_abs4_sum)(const cplx* u, const double* w, std::size_t n);
  /// max |u_i|^2
  double (*max_abs2)(const cplx* u, std::size_t n);
  /// sum w_i Im(conj(u_i) v_i)
  double (*weighted_im_cross)(const cplx* u, const cplx* v, const double* w, std::size_t n);
  /// u_i *= m_i
  void (*mul_complex)(cplx* u, const cplx* m, std::size_t n);
  /// u_i *= s_i
  void (*mul_real)(cplx* u, const double* s, std::size_t n);
  /// out_i = |u_i|^2
  void (*abs2)(const cplx* u, double* out, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the build or the CPU lacks AVX2+FMA.
const KernelTable* avx2_table() noexcept;
/// The table selected for this process.
const KernelTable& active() noexcept;

inline double abs2_sum(std::span<const cplx> u) { return active().abs2_sum(u.data(), u.size()); }
inline double weighted_abs2_sum(std::span<const cplx> u, std::span<const double> w) {
  return active().weighted_abs2_sum(u.data(), w.data(), u.size());
}
inline double weighted_abs4_sum(std::span<const cplx> u, std::span<const double> w) {
  return active().weighted_abs4_sum(u.data(), w.data(), u.size());
}
inline double max_abs2(std::span<const cplx> u) { return active().max_abs2(u.data(), u.size()); }
inline double weighted_im_cross(std::span<const cplx> u, std::span<const cplx> v, std::span<const double> w) {
  return active().weighted_im_cross(u.data(), v.data(), w.data(), u.size());
}
inline void mul_complex(std::span<cplx> u, std::span<const cplx> m) { active().mul_complex(u.data(), m.data(), u.size()); }
inline void mul_real(std::span<cplx> u, std::span<const double> s) { active().mul_real(u.data(), s.data(), u.size()); }
inline void abs2(std::span<const cplx> u, std::span<double> out) { active().abs2(u.data(), out.data(), u.size()); }

}  // namespace nlsrep::kernels
