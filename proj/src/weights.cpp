#include "nlsrep/weights.hpp"

#include <algorithm>
#include <cmath>

#include "nlsrep/error.hpp"

namespace nlsrep {

double CutoffProfile::bridge_start() noexcept { return 1.0 + 1.0 / std::sqrt(3.0); }

namespace {

// Quintic Hermite basis on [0,1] for data (p, p', p'') at t = 0 with
// p = p' = p'' = 0 at t = 1, as monomial coefficients.
constexpr std::array<double, 6> kH0{1.0, 0.0, 0.0, -10.0, 15.0, -6.0};
constexpr std::array<double, 6> kH1{0.0, 1.0, 0.0, -6.0, 8.0, -3.0};
constexpr std::array<double, 6> kH2{0.0, 0.0, 0.5, -1.5, 1.5, -0.5};

double cubic_zeta(double s) { return 2.0 * (s - std::pow(s - 1.0, 3)); }
double cubic_dzeta(double s) { return 2.0 - 6.0 * (s - 1.0) * (s - 1.0); }
double cubic_d2zeta(double s) { return -12.0 * (s - 1.0); }

}  // namespace

CutoffProfile::CutoffProfile() {
  const double a = bridge_start();
  width_ = bridge_end() - a;
  const double z0 = cubic_zeta(a);
  const double z1 = cubic_dzeta(a) * width_;
  const double z2 = cubic_d2zeta(a) * width_ * width_;
  for (int i = 0; i < 6; ++i) coef_[i] = z0 * kH0[i] + z1 * kH1[i] + z2 * kH2[i];
  chi_start_ = a * a - 0.5 * std::pow(a - 1.0, 4);

  constexpr int kSamples = 20000;
  for (int i = 1; i < kSamples; ++i) {
    const double t = static_cast<double>(i) / kSamples;
    if (!(poly(t, 1) < 0.0))
      throw Error(ErrorCode::bridge_construction_failure, "bridge derivative is not strictly negative");
  }
}

double CutoffProfile::poly(double t, int derivative) const noexcept {
  double acc = 0.0;
  for (int i = 5; i >= derivative; --i) {
    double c = coef_[i];
    for (int k = 0; k < derivative; ++k) c *= static_cast<double>(i - k);
    acc = acc * t + c;
  }
  return acc;
}

double CutoffProfile::zeta(double s) const noexcept {
  if (s <= 1.0) return 2.0 * s;
  if (s <= bridge_start()) return cubic_zeta(s);
  if (s < bridge_end()) return poly((s - bridge_start()) / width_, 0);
  return 0.0;
}

double CutoffProfile::dzeta(double s) const noexcept {
  if (s <= 1.0) return 2.0;
  if (s <= bridge_start()) return cubic_dzeta(s);
  if (s < bridge_end()) return poly((s - bridge_start()) / width_, 1) / width_;
  return 0.0;
}

double CutoffProfile::d2zeta(double s) const noexcept {
  if (s <= 1.0) return 0.0;
  if (s <= bridge_start()) return cubic_d2zeta(s);
  if (s < bridge_end()) return poly((s - bridge_start()) / width_, 2) / (width_ * width_);
  return 0.0;
}

double CutoffProfile::d3zeta(double s) const noexcept {
  if (s <= 1.0) return 0.0;
  if (s <= bridge_start()) return -12.0;
  if (s < bridge_end()) return poly((s - bridge_start()) / width_, 3) / (width_ * width_ * width_);
  return 0.0;
}

double CutoffProfile::chi(double s) const noexcept {
  if (s <= 1.0) return s * s;
  if (s <= bridge_start()) return s * s - 0.5 * std::pow(s - 1.0, 4);
  const double t = std::min(s, bridge_end()) - bridge_start();
  const double tt = t / width_;
  // Antiderivative of the bridge polynomial from 0 to tt, scaled back to s.
  double acc = 0.0;
  for (int i = 5; i >= 0; --i) acc = acc * tt + coef_[i] / (i + 1);
  return chi_start_ + width_ * acc * tt;
}

const CutoffProfile& cutoff_profile() {
  static const CutoffProfile profile;
  return profile;
}

LocalizedWeights eval_localized_weight(double R, int d, std::span<const double> radii) {
  if (!(R > 0.0)) throw Error(ErrorCode::invalid_spec, "localization radius must be positive");
  const CutoffProfile& z = cutoff_profile();
  LocalizedWeights w;
  w.R = R;
  w.d = d;
  const std::size_t n = radii.size();
  w.r.assign(radii.begin(), radii.end());
  w.phi.resize(n);
  w.dphi.resize(n);
  w.d2phi.resize(n);
  w.lap.resize(n);
  w.bilap.resize(n);
  w.psi1.resize(n);
  w.psi2.resize(n);
  w.radial_defect.resize(n);
  const double dm1 = d - 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = radii[i];
    const double s = r / R;
    const double zt = z.zeta(s), z1 = z.dzeta(s), z2 = z.d2zeta(s), z3 = z.d3zeta(s);
    w.phi[i] = R * R * z.chi(s);
    w.dphi[i] = R * zt;
    w.d2phi[i] = z1;
    // zeta(s)/s is exactly 2 on the quadratic core; avoid 0/0 near the origin.
    const double zeta_over_s = s <= 1.0 ? 2.0 : zt / s;
    w.lap[i] = z1 + dm1 * zeta_over_s;
    if (s <= 1.0 || s >= CutoffProfile::bridge_end()) {
      w.bilap[i] = 0.0;
    } else {
      const double h1 = z2 + dm1 * (z1 / s - zt / (s * s));
      const double h2 = z3 + dm1 * (z2 / s - 2.0 * z1 / (s * s) + 2.0 * zt / (s * s * s));
      w.bilap[i] = (h2 + dm1 * h1 / s) / (R * R);
    }
    w.psi1[i] = 2.0 - w.d2phi[i];
    w.psi2[i] = 2.0 * d - w.lap[i];
    w.radial_defect[i] = 2.0 - zeta_over_s;
  }
  return w;
}

LocalizedWeights eval_localized_weight(double R, const Grid& grid) {
  return eval_localized_weight(R, grid.dim(), grid.radius());
}

bool check_positivity_condition(const LocalizedWeights& w, double epsilon, double C) {
  const double half_d = 0.5 * w.d;
  for (std::size_t i = 0; i < w.r.size(); ++i) {
    const double lhs = w.psi1[i] - C * epsilon * std::pow(std::max(w.psi2[i], 0.0), half_d);
    if (lhs < -1e-13) return false;
  }
  return true;
}

}  // namespace nlsrep
