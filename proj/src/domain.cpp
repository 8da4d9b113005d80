#include "nlsrep/domain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlsrep/error.hpp"

namespace nlsrep {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_spec: return "invalid-spec";
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::resolution_too_small: return "resolution-too-small";
    case ErrorCode::invalid_field: return "invalid-field";
    case ErrorCode::no_convergence: return "no-convergence";
    case ErrorCode::invalid_regime: return "invalid-regime";
    case ErrorCode::regime_not_covered: return "regime-not-covered";
    case ErrorCode::wrong_dimension: return "wrong-dimension";
    case ErrorCode::insufficient_records: return "insufficient-records";
    case ErrorCode::not_radial: return "not-radial";
    case ErrorCode::bridge_construction_failure: return "bridge-construction-failure";
    case ErrorCode::config_invalid: return "config-invalid";
    case ErrorCode::resource: return "resource";
  }
  return "unknown";
}

std::string_view to_string(Nonlinearity s) {
  switch (s) {
    case Nonlinearity::focusing: return "focusing";
    case Nonlinearity::defocusing: return "defocusing";
    case Nonlinearity::none: return "none";
  }
  return "unknown";
}

Nonlinearity parse_nonlinearity(std::string_view s) {
  if (s == "focusing" || s == "-") return Nonlinearity::focusing;
  if (s == "defocusing" || s == "+") return Nonlinearity::defocusing;
  if (s == "none" || s == "off" || s == "linear") return Nonlinearity::none;
  throw Error(ErrorCode::invalid_spec, "unknown nonlinearity sign '" + std::string(s) + "'");
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::mass_subcritical: return "mass-subcritical";
    case Regime::mass_critical: return "mass-critical";
    case Regime::intercritical: return "intercritical";
    case Regime::energy_critical: return "energy-critical";
    case Regime::energy_supercritical: return "energy-supercritical";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::global_branch: return "global-branch";
    case Verdict::blowup_branch: return "blowup-branch";
    case Verdict::neither: return "neither";
    case Verdict::not_applicable: return "not-applicable";
  }
  return "unknown";
}

namespace {

// Exponents typed into a config file rarely hit 4/d to the last bit.
constexpr double kExponentTol = 1e-12;

bool same_exponent(double a, double b) { return std::abs(a - b) <= kExponentTol * std::max(1.0, std::abs(b)); }

bool is_energy_critical(int d, double alpha) { return d >= 3 && same_exponent(alpha, 4.0 / (d - 2)); }

}  // namespace

double EquationSpec::sign_factor() const noexcept {
  switch (sign) {
    case Nonlinearity::focusing: return -1.0;
    case Nonlinearity::defocusing: return 1.0;
    case Nonlinearity::none: return 0.0;
  }
  return 0.0;
}

void EquationSpec::validate() const {
  if (d < 1 || d > 3) throw Error(ErrorCode::invalid_spec, "dimension must be 1, 2 or 3");
  const double sigma_max = std::min(2.0, static_cast<double>(d));
  if (!(sigma > 0.0 && sigma < sigma_max))
    throw Error(ErrorCode::invalid_spec, "sigma must lie in (0, min(2,d))");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::invalid_spec, "alpha must be positive");
  if (!std::isfinite(c)) throw Error(ErrorCode::invalid_spec, "c must be finite");
}

double beta_c_direct(int d, double alpha) { return (4.0 - (d - 2) * alpha) / (d * alpha - 4.0); }

CriticalityInfo classify_criticality(const EquationSpec& spec) {
  const int d = spec.d;
  const double alpha = spec.alpha;
  CriticalityInfo info;

  const bool mass_critical = same_exponent(alpha, 4.0 / d);
  const bool energy_critical = is_energy_critical(d, alpha);

  if (mass_critical) {
    info.gamma_c = 0.0;
    info.regime = Regime::mass_critical;
  } else if (energy_critical) {
    info.gamma_c = 1.0;
    info.regime = Regime::energy_critical;
  } else {
    info.gamma_c = 0.5 * d - 2.0 / alpha;
    if (alpha < 4.0 / d)
      info.regime = Regime::mass_subcritical;
    else if (d >= 3 && alpha > 4.0 / (d - 2))
      info.regime = Regime::energy_supercritical;
    else
      info.regime = Regime::intercritical;
  }

  if (info.gamma_c > 0.0)
    info.beta_c = (1.0 - info.gamma_c) / info.gamma_c;
  else if (info.gamma_c == 0.0)
    info.beta_c = std::numeric_limits<double>::infinity();
  else
    info.beta_c = std::numeric_limits<double>::quiet_NaN();

  info.radial_blowup_alpha_le_4 = info.regime == Regime::intercritical && alpha <= 4.0;
  info.energy_critical_sigma_ok = info.regime != Regime::energy_critical || spec.sigma < 1.5;
  return info;
}

namespace {

bool strictly_less(double a, double b) {
  return a < b - kThresholdRelTol * std::max(std::abs(a), std::abs(b));
}

bool strictly_greater(double a, double b) { return strictly_less(b, a); }

Verdict combine(bool energy_below, bool grad_below, bool grad_above) {
  if (energy_below && grad_below) return Verdict::global_branch;
  if (energy_below && grad_above) return Verdict::blowup_branch;
  return Verdict::neither;
}

}  // namespace

ThresholdVerdict threshold_test(const EquationSpec& spec, double mass, double energy, double gradnorm,
                                const ReferenceNorms& ref) {
  spec.validate();
  const CriticalityInfo crit = classify_criticality(spec);
  ThresholdVerdict out;
  out.regime = crit.regime;

  if (crit.regime == Regime::mass_subcritical || crit.regime == Regime::energy_supercritical)
    throw Error(ErrorCode::regime_not_covered,
                "threshold tests exist only for mass-critical, intercritical and energy-critical powers");
  if (ref.d != spec.d || !same_exponent(ref.alpha, spec.alpha))
    throw Error(ErrorCode::invalid_spec, "reference profile does not match (d, alpha)");
  if (!(mass >= 0.0) || !(gradnorm >= 0.0) || !std::isfinite(energy))
    throw Error(ErrorCode::invalid_field, "non-finite or negative norms");

  if (spec.sign != Nonlinearity::focusing || spec.outside_main_theorems()) {
    out.verdict = Verdict::not_applicable;
    return out;
  }

  const int d = spec.d;
  const double alpha = spec.alpha;

  switch (crit.regime) {
    case Regime::mass_critical: {
      out.quantity_em = energy;
      out.bound_em = 0.0;
      out.quantity_gm = std::sqrt(mass);
      out.bound_gm = std::sqrt(ref.mass);
      const bool global = strictly_less(out.quantity_gm, out.bound_gm);
      // Negative energy is compared against the kinetic scale, since the
      // bound itself is zero.
      const double scale = std::max(0.5 * gradnorm * gradnorm, std::abs(energy));
      const bool blowup = energy < -kThresholdRelTol * scale;
      out.verdict = global && !blowup ? Verdict::global_branch
                    : blowup && !global ? Verdict::blowup_branch
                                        : Verdict::neither;
      break;
    }
    case Regime::intercritical: {
      const double beta = crit.beta_c;
      const double ref_gm = std::sqrt(ref.kinetic) * std::pow(ref.mass, 0.5 * beta);
      out.bound_gm = ref_gm;
      out.bound_em = (d * alpha - 4.0) / (2.0 * d * alpha) * ref_gm * ref_gm;
      out.quantity_em = energy * std::pow(mass, beta);
      out.quantity_gm = gradnorm * std::pow(mass, 0.5 * beta);
      out.verdict = combine(strictly_less(out.quantity_em, out.bound_em),
                            strictly_less(out.quantity_gm, out.bound_gm),
                            strictly_greater(out.quantity_gm, out.bound_gm));
      break;
    }
    case Regime::energy_critical: {
      out.bound_em = std::isfinite(ref.energy) ? ref.energy : ref.kinetic / d;
      out.bound_gm = std::sqrt(ref.kinetic);
      out.quantity_em = energy;
      out.quantity_gm = gradnorm;
      out.verdict = combine(strictly_less(out.quantity_em, out.bound_em),
                            strictly_less(out.quantity_gm, out.bound_gm),
                            strictly_greater(out.quantity_gm, out.bound_gm));
      break;
    }
    default: break;
  }
  return out;
}

}  // namespace nlsrep
