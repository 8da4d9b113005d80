#include "nlsrep/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "nlsrep/error.hpp"
#include "nlsrep/evolve.hpp"
#include "nlsrep/kernels.hpp"

namespace nlsrep {

namespace {

double sum_weighted_pow(const std::vector<cplx>& u, const std::vector<double>& w, double p) {
  double acc = 0.0;
  const double half = 0.5 * p;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a2 = std::norm(u[i]);
    if (a2 > 0.0 && w[i] != 0.0) acc += w[i] * std::pow(a2, half);
  }
  return acc;
}

}  // namespace

Observer::Observer(GridPtr grid, const EquationSpec& spec, std::vector<double> R_list, double epsilon_reg)
    : grid_(std::move(grid)), spec_(spec), R_(std::move(R_list)) {
  if (!grid_) throw Error(ErrorCode::invalid_spec, "observer needs a grid");
  V_ = nlsrep::potential_table(*grid_, spec_.sigma, epsilon_reg);
  const auto r = grid_->radius();
  x2_.resize(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) x2_[i] = r[i] * r[i];
  for (double R : R_) w_.push_back(eval_localized_weight(R, *grid_));
}

ObservableRecord Observer::operator()(const Field& u) const {
  u.require_finite("record");
  const Grid& g = *grid_;
  const auto q = g.quad_weight();
  const double a = spec_.alpha;
  const double s = spec_.sign_factor();
  ObservableRecord rec;
  rec.t = u.time;
  rec.mass = mass(u);
  rec.kinetic = gradient_norm_sq(u);
  rec.potential = weighted_norm(u, V_);
  rec.potential_term = 0.5 * spec_.c * rec.potential;
  rec.lp = lp_integral(u, a + 2.0);
  rec.nonlinear_term = s * rec.lp / (a + 2.0);
  rec.energy = 0.5 * rec.kinetic + rec.potential_term + rec.nonlinear_term;
  rec.virial = weighted_norm(u, x2_);
  rec.l4_density = g.dim() == 3 ? lp_integral(u, 4.0) : 0.0;
  rec.linfty = linf_norm(u);
  rec.boundary_fraction = boundary_shell_fraction(u);

  const auto grad = gradient(u);
  const auto r = g.radius();
  const std::size_t n = u.size();
  std::vector<double> wx2(n), wabs(n);
  if (g.radial()) {
    for (std::size_t i = 0; i < n; ++i) {
      wx2[i] = 4.0 * r[i] * q[i];
      wabs[i] = 2.0 * q[i];
    }
    rec.morawetz_x2 = kernels::weighted_im_cross(u.values, grad[0], wx2);
    rec.morawetz_abs = kernels::weighted_im_cross(u.values, grad[0], wabs);
  } else {
    for (int axis = 0; axis < g.dim(); ++axis) {
      for (std::size_t i = 0; i < n; ++i) {
        const double x = g.coordinate(i, axis);
        wx2[i] = 4.0 * x * q[i];
        wabs[i] = 2.0 * x / r[i] * q[i];
      }
      rec.morawetz_x2 += kernels::weighted_im_cross(u.values, grad[axis], wx2);
      rec.morawetz_abs += kernels::weighted_im_cross(u.values, grad[axis], wabs);
    }
  }

  rec.virial_phiR.reserve(w_.size());
  rec.virial_phiR_defect.reserve(w_.size());
  const double sc = 2.0 * spec_.c * spec_.sigma;
  const double nc = s * 2.0 * a / (a + 2.0);
  for (const auto& w : w_) {
    rec.virial_phiR.push_back(weighted_norm(u, w.phi));
    if (!g.radial()) {
      rec.virial_phiR_defect.push_back(0.0);
      continue;
    }
    double acc = 0.0;
    std::vector<double> tp(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u2 = std::norm(u.values[i]);
      acc += q[i] * (-w.bilap[i] - sc * w.radial_defect[i] * V_[i]) * u2;
      acc -= 4.0 * q[i] * w.psi1[i] * std::norm(grad[0][i]);
      tp[i] = nc * q[i] * w.psi2[i];
    }
    acc += sum_weighted_pow(u.values, tp, a + 2.0);
    rec.virial_phiR_defect.push_back(acc);
  }
  return rec;
}

ObservableRecord record(const Field& u, const EquationSpec& spec, std::vector<double> R_list) {
  return Observer(u.grid, spec, std::move(R_list))(u);
}

double morawetz_action(const Field& u, const std::function<double(double)>& da) {
  u.require_finite("morawetz_action");
  const Grid& g = *u.grid;
  const auto q = g.quad_weight();
  const auto r = g.radius();
  const auto grad = gradient(u);
  const std::size_t n = u.size();
  std::vector<double> w(n);
  if (g.radial()) {
    for (std::size_t i = 0; i < n; ++i) w[i] = 2.0 * da(r[i]) * q[i];
    return kernels::weighted_im_cross(u.values, grad[0], w);
  }
  double acc = 0.0;
  for (int axis = 0; axis < g.dim(); ++axis) {
    for (std::size_t i = 0; i < n; ++i) w[i] = 2.0 * da(r[i]) * g.coordinate(i, axis) / r[i] * q[i];
    acc += kernels::weighted_im_cross(u.values, grad[axis], w);
  }
  return acc;
}

double VirialForms::mutual_rel() const noexcept {
  const double scale = std::max({std::abs(f1), std::abs(f2), std::abs(f3)});
  if (scale == 0.0) return 0.0;
  const double d = std::max({std::abs(f1 - f2), std::abs(f1 - f3), std::abs(f2 - f3)});
  return d / scale;
}

VirialForms virial_forms(const ObservableRecord& r, const EquationSpec& spec) {
  const double d = spec.d, a = spec.alpha, c = spec.c, sg = spec.sigma, s = spec.sign_factor();
  const double K = r.kinetic, P = r.potential, N = r.lp, E = r.energy;
  VirialForms f;
  f.f1 = 8.0 * K + 4.0 * c * sg * P + s * 4.0 * d * a / (a + 2.0) * N;
  f.f2 = 16.0 * E - 4.0 * c * (2.0 - sg) * P + s * 4.0 * (d * a - 4.0) / (a + 2.0) * N;
  f.f3 = 4.0 * d * a * E - 2.0 * (d * a - 4.0) * K - 2.0 * c * (d * a - 2.0 * sg) * P;
  return f;
}

namespace {

double uniform_stride(std::span<const ObservableRecord> rec) {
  if (rec.size() < 3) throw Error(ErrorCode::insufficient_records, "need at least three records");
  const double h = rec[1].t - rec[0].t;
  if (!(h > 0.0)) throw Error(ErrorCode::insufficient_records, "records are not increasing in time");
  for (std::size_t i = 1; i < rec.size(); ++i) {
    if (std::abs((rec[i].t - rec[i - 1].t) - h) > 1e-9 * h)
      throw Error(ErrorCode::insufficient_records, "records are not uniformly strided");
  }
  return h;
}

}  // namespace

VirialCheck virial_identity_check(std::span<const ObservableRecord> records, const EquationSpec& spec,
                                  double tolerance) {
  const double h = uniform_stride(records);
  VirialCheck out;
  out.check.name = spec.sign == Nonlinearity::focusing ? "virial identity" : "virial identity (derived analogue)";
  double scale = 0.0;
  for (std::size_t i = 1; i + 1 < records.size(); ++i) scale = std::max(scale, std::abs(virial_forms(records[i], spec).f1));
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const double lhs = (records[i + 1].virial - 2.0 * records[i].virial + records[i - 1].virial) / (h * h);
    const VirialForms f = virial_forms(records[i], spec);
    out.forms_agreement = std::max(out.forms_agreement, f.mutual_rel());
    for (double rhs : {f.f1, f.f2, f.f3}) {
      const double e = scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
      if (e >= worst) {
        worst = e;
        out.check.lhs = lhs;
        out.check.rhs = rhs;
      }
    }
    ++out.interior_points;
  }
  out.check.rel_error = worst;
  out.check.pass = worst <= tolerance;
  return out;
}

IdentityCheck morawetz_rate_check(std::span<const ObservableRecord> records, double tolerance) {
  const double h = uniform_stride(records);
  IdentityCheck c;
  c.name = "dV/dt = M_{|x|^2}";
  double scale = 0.0;
  for (const auto& r : records) scale = std::max(scale, std::abs(r.morawetz_x2));
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const double lhs = (records[i + 1].virial - records[i - 1].virial) / (2.0 * h);
    const double e = scale > 0.0 ? std::abs(lhs - records[i].morawetz_x2) / scale : std::abs(lhs);
    if (e >= worst) {
      worst = e;
      c.lhs = lhs;
      c.rhs = records[i].morawetz_x2;
    }
  }
  c.rel_error = worst;
  c.pass = worst <= tolerance;
  return c;
}

LocalizedVirialCheck localized_virial_bound_check(std::span<const ObservableRecord> records,
                                                  const EquationSpec& spec, std::size_t R_index, double R,
                                                  bool radial) {
  if (!radial) throw Error(ErrorCode::not_radial, "localized virial check needs radial data");
  const double h = uniform_stride(records);
  LocalizedVirialCheck out;
  out.R = R;
  out.excess = -std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (std::size_t i = 1; i + 1 < records.size(); ++i) {
    const auto& r = records[i];
    if (R_index >= r.virial_phiR.size())
      throw Error(ErrorCode::insufficient_records, "records carry no localized virial for this radius");
    const double lhs =
        (records[i + 1].virial_phiR[R_index] - 2.0 * r.virial_phiR[R_index] + records[i - 1].virial_phiR[R_index]) /
        (h * h);
    const double rhs = virial_forms(r, spec).f1;
    const double dev = lhs - rhs;
    out.slack = std::max(out.slack, std::abs(dev));
    out.identity_slack = std::max(out.identity_slack, std::abs(r.virial_phiR_defect[R_index]));
    out.excess = std::max(out.excess, dev);
    out.consistency = std::max(out.consistency, std::abs(dev - r.virial_phiR_defect[R_index]));
    scale = std::max(scale, std::abs(rhs));
  }
  if (scale > 0.0) out.consistency /= scale;
  return out;
}

SlackScaling slack_scaling(const std::vector<LocalizedVirialCheck>& checks) {
  SlackScaling s;
  s.consistent_with_r2 = checks.size() >= 2;
  for (const auto& c : checks) {
    s.R.push_back(c.R);
    s.slack.push_back(c.slack);
  }
  for (std::size_t i = 0; i + 1 < checks.size(); ++i) {
    const double f = checks[i].slack / checks[i + 1].slack;
    s.factors.push_back(f);
    if (!(f >= 2.0 && f <= 8.0)) s.consistent_with_r2 = false;
  }
  return s;
}

double radial_sobolev_proven_constant(int d) {
  constexpr double pi = std::numbers::pi;
  const double area = d == 1 ? 2.0 : d == 2 ? 2.0 * pi : 4.0 * pi;
  return std::sqrt(2.0 / area);
}

namespace {

double sobolev_ratio(const Field& f, double& lhs, double& prod) {
  const Grid& g = *f.grid;
  const auto r = g.radius();
  const double e = 0.5 * (g.dim() - 1);
  lhs = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) lhs = std::max(lhs, std::pow(r[i], e) * std::abs(f.values[i]));
  prod = std::pow(mass(f) * gradient_norm_sq(f), 0.25);
  return prod > 0.0 ? lhs / prod : 0.0;
}

}  // namespace

double radial_sobolev_constant(int d) {
  static const std::array<double, 4> table = [] {
    std::array<double, 4> t{};
    for (int dd = 2; dd <= 3; ++dd) {
      GridPtr g = make_grid(dd, 8192, 40.0, GridMode::radial);
      const std::array<std::function<cplx(double)>, 3> family{
          [](double r) { return cplx(std::exp(-0.5 * r * r), 0.0); },
          [](double r) { return cplx(1.0 / std::cosh(r), 0.0); },
          [dd](double r) { return cplx(std::pow(1.0 + r * r, -dd), 0.0); },
      };
      double best = 0.0;
      for (const auto& f : family) {
        double lhs = 0.0, prod = 0.0;
        best = std::max(best, sobolev_ratio(sample_radial(g, f), lhs, prod));
      }
      t[dd] = best;
    }
    return t;
  }();
  if (d < 2 || d > 3) throw Error(ErrorCode::wrong_dimension, "radial Sobolev needs d = 2 or 3");
  return table[d];
}

RadialSobolevCheck radial_sobolev_oracle(const Field& f) {
  if (!f.grid->radial()) throw Error(ErrorCode::not_radial, "radial Sobolev oracle needs a radial field");
  const int d = f.grid->dim();
  if (d < 2) throw Error(ErrorCode::wrong_dimension, "radial Sobolev needs d >= 2");
  f.require_finite("radial_sobolev_oracle");
  RadialSobolevCheck c;
  c.ratio = sobolev_ratio(f, c.lhs, c.norm_product);
  c.rhs = radial_sobolev_constant(d) * c.norm_product;
  c.holds = c.lhs <= c.rhs * (1.0 + 1e-12);
  c.holds_proven = c.lhs <= radial_sobolev_proven_constant(d) * c.norm_product * (1.0 + 1e-12);
  return c;
}

InteractionMorawetz interaction_morawetz_l4(std::span<const ObservableRecord> records, int d,
                                            std::span<const double> horizons) {
  if (d != 3) throw Error(ErrorCode::wrong_dimension, "interaction Morawetz L4 bound is for d = 3");
  InteractionMorawetz out;
  for (double T : horizons) {
    double integral = 0.0, supM = 0.0, supK = 0.0;
    for (std::size_t i = 0; i < records.size() && records[i].t <= T * (1.0 + 1e-12); ++i) {
      supM = std::max(supM, records[i].mass);
      supK = std::max(supK, records[i].kinetic);
      if (i > 0) integral += 0.5 * (records[i].t - records[i - 1].t) * (records[i].l4_density + records[i - 1].l4_density);
    }
    const double cap = std::pow(supM, 1.5) * std::sqrt(supK);
    out.horizon.push_back(T);
    out.lhs.push_back(integral);
    out.rhs_cap.push_back(cap);
    out.ratio.push_back(cap > 0.0 ? integral / cap : 0.0);
  }
  return out;
}

double h1_norm(const Field& f) { return std::sqrt(mass(f) + gradient_norm_sq(f)); }

std::vector<double> scattering_cauchy_diagnostic(std::span<const Field> checkpoints, const EquationSpec& spec,
                                                 double dt) {
  const bool control = spec.sign == Nonlinearity::none;
  if (!control) {
    const CriticalityInfo ci = classify_criticality(spec);
    if (spec.d != 3 || spec.sign != Nonlinearity::defocusing || ci.regime != Regime::intercritical || spec.c < 0.0)
      throw Error(ErrorCode::regime_not_covered, "scattering diagnostic covers defocusing intercritical d = 3");
  }
  std::vector<Field> pulled;
  pulled.reserve(checkpoints.size());
  for (const Field& u : checkpoints) pulled.push_back(evolve_linear(u, spec, -u.time, dt));
  std::vector<double> inc;
  for (std::size_t i = 0; i + 1 < pulled.size(); ++i) {
    Field diff(pulled[i].grid);
    for (std::size_t k = 0; k < diff.size(); ++k) diff.values[k] = pulled[i + 1].values[k] - pulled[i].values[k];
    inc.push_back(h1_norm(diff));
  }
  return inc;
}

}  // namespace nlsrep
