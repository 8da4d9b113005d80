#pragma once

#include <limits>
#include <string_view>

namespace nlsrep {

/// Sign in front of |u|^alpha u. `none` switches the nonlinearity off and is
/// only used for linear reference runs.
enum class Nonlinearity { focusing, defocusing, none };

std::string_view to_string(Nonlinearity s);
Nonlinearity parse_nonlinearity(std::string_view s);

/// i u_t + Laplace(u) - c |x|^{-sigma} u = (+/-) |u|^alpha u  on R^d.
struct EquationSpec {
  int d = 1;
  double c = 1.0;
  double sigma = 0.5;
  double alpha = 2.0;
  Nonlinearity sign = Nonlinearity::defocusing;

  /// +1 defocusing, -1 focusing, 0 when the nonlinearity is off.
  double sign_factor() const noexcept;

  /// Throws Error(invalid_spec) on d outside {1,2,3}, sigma outside
  /// (0, min(2,d)), alpha <= 0, or an energy-critical power in d != 3.
  void validate() const;

  /// c < 0 is accepted for exploratory runs but none of the threshold
  /// theorems cover it.
  bool outside_main_theorems() const noexcept { return c < 0.0; }
};

enum class Regime {
  mass_subcritical,
  mass_critical,
  intercritical,
  energy_critical,
  energy_supercritical,
};

std::string_view to_string(Regime r);

struct CriticalityInfo {
  double gamma_c = 0.0;
  /// (1 - gamma_c) / gamma_c; +inf when gamma_c == 0 and NaN when gamma_c < 0.
  double beta_c = std::numeric_limits<double>::infinity();
  Regime regime = Regime::mass_subcritical;
  /// Radial blow-up in the intercritical regime additionally asks alpha <= 4.
  /// Whether that restriction is sharp is unknown; we only record it.
  bool radial_blowup_alpha_le_4 = false;
  /// Energy-critical d = 3 results are stated for 0 < sigma < 3/2.
  bool energy_critical_sigma_ok = true;
};

CriticalityInfo classify_criticality(const EquationSpec& spec);

/// beta_c through its second algebraic form (4 - (d-2) alpha) / (d alpha - 4).
double beta_c_direct(int d, double alpha);

enum class Verdict { global_branch, blowup_branch, neither, not_applicable };

std::string_view to_string(Verdict v);

/// Norms of the comparison profile: Q (mass and kinetic) for the
/// mass-critical and intercritical tests, W (kinetic only) for the
/// energy-critical one.
struct ReferenceNorms {
  int d = 1;
  double alpha = 0.0;
  double mass = 0.0;     // ||Q||_2^2, unused for W
  double kinetic = 0.0;  // ||grad Q||_2^2 or ||grad W||_2^2
  double energy = std::numeric_limits<double>::quiet_NaN();  // E_0(W); Q side is derived
};

struct ThresholdVerdict {
  /// E M^beta (intercritical), E (mass- and energy-critical).
  double quantity_em = 0.0;
  /// ||grad u|| ||u||^beta (intercritical), ||u||_2 (mass-critical),
  /// ||grad u|| (energy-critical).
  double quantity_gm = 0.0;
  double bound_em = 0.0;
  double bound_gm = 0.0;
  Verdict verdict = Verdict::not_applicable;
  Regime regime = Regime::mass_subcritical;
};

/// Relative tolerance inside which a comparison counts as an equality.
inline constexpr double kThresholdRelTol = 1e-9;

/// Static global-existence / blow-up tests. `mass` is ||u0||_2^2,
/// `gradnorm` is ||grad u0||_2 (not squared).
ThresholdVerdict threshold_test(const EquationSpec& spec, double mass, double energy,
                                double gradnorm, const ReferenceNorms& ref);

}  // namespace nlsrep
