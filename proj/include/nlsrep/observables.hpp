#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nlsrep/domain.hpp"
#include "nlsrep/grid.hpp"
#include "nlsrep/weights.hpp"

namespace nlsrep {

/// One time slice of the monitored quantities.
struct ObservableRecord {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double kinetic = 0.0;         // ||grad u||^2
  double potential = 0.0;       // int |x|^{-sigma} |u|^2
  double potential_term = 0.0;  // c/2 * potential
  double lp = 0.0;              // ||u||_{alpha+2}^{alpha+2}
  double nonlinear_term = 0.0;  // sign * lp / (alpha + 2)
  double virial = 0.0;          // ||x u||^2
  double morawetz_x2 = 0.0;     // M_{|x|^2} = dV/dt
  double morawetz_abs = 0.0;    // M_{|x|}
  double l4_density = 0.0;      // int |u|^4 (d = 3)
  double linfty = 0.0;
  double boundary_fraction = 0.0;
  /// One entry per localization radius: V_{phi_R} and the deviation of its
  /// second derivative from the unlocalized virial right-hand side,
  ///   -int Lap^2 phi |u|^2 - 4 int psi_1 |d_r u|^2
  ///   - 2 c sigma int (2 - phi'/r) |x|^{-sigma} |u|^2 + sign (2a/(a+2)) int psi_2 |u|^{a+2}
  /// (radial grids only; zero otherwise).
  std::vector<double> virial_phiR;
  std::vector<double> virial_phiR_defect;
};

/// Evaluates records on one grid. Potential and weight tables are built once.
class Observer {
 public:
  Observer(GridPtr grid, const EquationSpec& spec, std::vector<double> R_list = {}, double epsilon_reg = 0.0);

  ObservableRecord operator()(const Field& u) const;

  const std::vector<double>& radii() const noexcept { return R_; }
  const EquationSpec& spec() const noexcept { return spec_; }
  std::span<const double> potential_table() const noexcept { return V_; }

 private:
  GridPtr grid_;
  EquationSpec spec_;
  std::vector<double> R_;
  std::vector<double> V_;
  std::vector<double> x2_;
  std::vector<LocalizedWeights> w_;
};

ObservableRecord record(const Field& u, const EquationSpec& spec, std::vector<double> R_list = {});

/// 2 int grad a . Im(conj(u) grad u) for a radial weight a, given a'(r).
double morawetz_action(const Field& u, const std::function<double(double)>& da);

/// The three forms of the virial right-hand side for one record:
///   8K + 4 c sigma P + s 4 d a/(a+2) N,
///   16E - 4c(2-sigma)P + s 4(d a - 4)/(a+2) N,
///   4 d a E - 2(d a - 4)K - 2c(d a - 2 sigma)P,
/// with s the sign factor (-1 focusing). For s = +1 these are the derived
/// defocusing analogue.
struct VirialForms {
  double f1 = 0.0, f2 = 0.0, f3 = 0.0;
  /// max |f_i - f_j| / max |f_i|.
  double mutual_rel() const noexcept;
};
VirialForms virial_forms(const ObservableRecord& r, const EquationSpec& spec);

struct IdentityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_error = 0.0;
  bool pass = false;
};

/// Central second difference of V against each form at every interior
/// record; rel_error is the worst relative error of the three, and
/// forms_agreement the worst mutual disagreement of the forms. Records must
/// be uniformly strided (throws insufficient_records with fewer than three).
struct VirialCheck {
  IdentityCheck check;
  double forms_agreement = 0.0;
  std::size_t interior_points = 0;
};
VirialCheck virial_identity_check(std::span<const ObservableRecord> records, const EquationSpec& spec,
                                  double tolerance = 1e-3);

/// dV/dt by central differences against M_{|x|^2}; worst relative error.
IdentityCheck morawetz_rate_check(std::span<const ObservableRecord> records, double tolerance);

struct LocalizedVirialCheck {
  double R = 0.0;
  /// sup over interior records of |second difference of V_{phi_R} - RHS|.
  double slack = 0.0;
  /// sup of the same deviation evaluated from the pointwise identity.
  double identity_slack = 0.0;
  /// sup of (second difference - RHS); the bound holds when <= slack.
  double excess = 0.0;
  /// sup |second difference - (RHS + identity defect)| / scale.
  double consistency = 0.0;
};

/// Needs radial records (throws not_radial otherwise) and at least three.
LocalizedVirialCheck localized_virial_bound_check(std::span<const ObservableRecord> records,
                                                  const EquationSpec& spec, std::size_t R_index, double R,
                                                  bool radial);

struct SlackScaling {
  std::vector<double> R;
  std::vector<double> slack;
  std::vector<double> factors;  // slack(R_i) / slack(R_{i+1})
  bool consistent_with_r2 = false;  // every factor in [2, 8]
};
SlackScaling slack_scaling(const std::vector<LocalizedVirialCheck>& checks);

/// sup r^{(d-1)/2} |f| against C ||f||^{1/2} ||grad f||^{1/2}.
struct RadialSobolevCheck {
  double lhs = 0.0;
  double norm_product = 0.0;  // ||f||^{1/2} ||grad f||^{1/2}
  double ratio = 0.0;         // lhs / norm_product
  double rhs = 0.0;           // calibrated C times norm_product
  bool holds = true;
  bool holds_proven = true;   // against sqrt(2 / |S^{d-1}|)
};

/// Largest ratio over the reference family {exp(-r^2/2), sech r,
/// (1 + r^2)^{-d}} on the given grid; frozen after the first call per d.
double radial_sobolev_constant(int d);
double radial_sobolev_proven_constant(int d);
RadialSobolevCheck radial_sobolev_oracle(const Field& f);

/// Space-time L4 norm over [0, T] for each horizon and the constant-free cap
/// (sup M)^{3/2} (sup K)^{1/2}.
struct InteractionMorawetz {
  std::vector<double> horizon;
  std::vector<double> lhs;
  std::vector<double> rhs_cap;
  std::vector<double> ratio;
};
InteractionMorawetz interaction_morawetz_l4(std::span<const ObservableRecord> records, int d,
                                            std::span<const double> horizons);

/// Pull each checkpoint back to t = 0 with the linear flow and return
/// || v(t_{i+1}) - v(t_i) ||_{H^1}, H^1 norm = (mass + kinetic)^{1/2}.
/// Only defocusing intercritical d = 3 specs (throws regime_not_covered).
/// A spec with the nonlinearity off is accepted as a control.
std::vector<double> scattering_cauchy_diagnostic(std::span<const Field> checkpoints, const EquationSpec& spec,
                                                 double dt);

double h1_norm(const Field& f);

}  // namespace nlsrep
