#pragma once

#include <array>
#include <span>
#include <vector>

#include "nlsrep/grid.hpp"

namespace nlsrep {

/// Unit-scale cutoff used by the localized virial weights:
///   zeta(s) = 2s on [0,1], 2[s - (s-1)^3] on (1, 1 + 1/sqrt 3],
///   a quintic Hermite bridge on (1 + 1/sqrt 3, 2), 0 on [2, inf),
/// and chi(s) = int_0^s zeta. The bridge matches zeta, zeta', zeta'' at its
/// left end and vanishes to second order at s = 2, so chi is C^3. The
/// constructor verifies zeta' < 0 strictly inside the bridge and throws
/// Error(bridge_construction_failure) otherwise.
class CutoffProfile {
 public:
  CutoffProfile();

  static double bridge_start() noexcept;
  static constexpr double bridge_end() noexcept { return 2.0; }

  double zeta(double s) const noexcept;
  double dzeta(double s) const noexcept;
  double d2zeta(double s) const noexcept;
  double d3zeta(double s) const noexcept;
  double chi(double s) const noexcept;

  /// Monomial coefficients of the bridge in t = (s - start) / (end - start).
  const std::array<double, 6>& bridge_coefficients() const noexcept { return coef_; }

 private:
  double poly(double t, int derivative) const noexcept;
  std::array<double, 6> coef_{};
  double chi_start_ = 0.0;
  double width_ = 0.0;
};

const CutoffProfile& cutoff_profile();

/// phi_R(x) = R^2 chi(|x|/R) and the derived quantities, sampled at a list of
/// radii.
struct LocalizedWeights {
  double R = 1.0;
  int d = 1;
  std::vector<double> r;
  std::vector<double> phi;      // phi_R
  std::vector<double> dphi;     // phi_R'
  std::vector<double> d2phi;    // phi_R''
  std::vector<double> lap;      // Laplacian of phi_R
  std::vector<double> bilap;    // bi-Laplacian of phi_R
  std::vector<double> psi1;     // 2 - phi_R''
  std::vector<double> psi2;     // 2d - Laplacian of phi_R
  std::vector<double> radial_defect;  // 2 - phi_R'/r
};

LocalizedWeights eval_localized_weight(double R, int d, std::span<const double> radii);
/// Sampled at every node of a grid (|x| for cartesian nodes).
LocalizedWeights eval_localized_weight(double R, const Grid& grid);

/// psi_1 - C eps psi_2^{d/2} >= 0 at every sample.
bool check_positivity_condition(const LocalizedWeights& w, double epsilon, double C);

}  // namespace nlsrep
