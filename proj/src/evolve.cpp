#include "nlsrep/evolve.hpp"

#include <algorithm>
#include <cmath>

#include "nlsrep/error.hpp"
#include "nlsrep/fourier.hpp"
#include "nlsrep/kernels.hpp"

namespace nlsrep {

std::string_view to_string(Adaptivity a) { return a == Adaptivity::fixed ? "fixed" : "cfl-nonlinear"; }

Adaptivity parse_adaptivity(std::string_view s) {
  if (s == "fixed") return Adaptivity::fixed;
  if (s == "cfl-nonlinear" || s == "cfl") return Adaptivity::cfl_nonlinear;
  throw Error(ErrorCode::config_invalid, "unknown adaptivity '" + std::string(s) + "'");
}

std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::blowup_detected: return "blowup-detected";
    case RunStatus::invalid: return "invalid";
  }
  return "?";
}

void EvolveConfig::validate() const {
  if (!(dt0 > 0.0)) throw Error(ErrorCode::invalid_spec, "dt0 must be positive");
  if (!(t_end > 0.0)) throw Error(ErrorCode::invalid_spec, "t_end must be positive");
  if (!(blowup_grad_factor > 1.0)) throw Error(ErrorCode::invalid_spec, "blowup_grad_factor must exceed 1");
  if (!(blowup_dt_floor > 0.0)) throw Error(ErrorCode::invalid_spec, "blowup_dt_floor must be positive");
  if (!(cfl > 0.0)) throw Error(ErrorCode::invalid_spec, "cfl must be positive");
  if (record_interval < 0.0) throw Error(ErrorCode::invalid_spec, "record_interval must be >= 0");
  for (double R : R_list)
    if (!(R > 0.0)) throw Error(ErrorCode::invalid_spec, "localization radii must be positive");
}

struct Propagator::Cache {
  double tau = std::numeric_limits<double>::quiet_NaN();
  std::vector<cplx> multiplier;
  std::unique_ptr<RadialLaplacian> lap;
  std::vector<cplx> rhs;
};

Propagator::Propagator(GridPtr grid, const EquationSpec& spec, double epsilon_reg)
    : grid_(std::move(grid)), spec_(spec), cache_(new Cache) {
  if (!grid_) throw Error(ErrorCode::invalid_spec, "propagator needs a grid");
  cV_ = potential_table(*grid_, spec_.sigma, epsilon_reg);
  for (double& v : cV_) v *= spec_.c;
  if (grid_->radial()) cache_->lap = std::make_unique<RadialLaplacian>(*grid_);
}

Propagator::~Propagator() { delete cache_; }

void Propagator::free_flow(std::vector<cplx>& u, double tau) {
  Cache& c = *cache_;
  if (grid_->radial()) {
    // Crank-Nicolson for u_t = i L u.
    c.rhs.resize(u.size());
    c.lap->apply(std::span<const cplx>(u), std::span<cplx>(c.rhs));
    const cplx half(0.0, 0.5 * tau);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += half * c.rhs[i];
    c.lap->solve(cplx(1.0, 0.0), -half, std::span<cplx>(u));
    return;
  }
  if (c.tau != tau) {
    const auto k2 = grid_->k2();
    c.multiplier.resize(k2.size());
    for (std::size_t i = 0; i < k2.size(); ++i) c.multiplier[i] = std::polar(1.0, -tau * k2[i]);
    c.tau = tau;
  }
  const Fourier& F = grid_->fourier();
  F.forward(u);
  kernels::mul_complex(u, c.multiplier);
  F.inverse(u);
}

void Propagator::phase(std::vector<cplx>& u, double dt, bool nonlinear) {
  const double s = nonlinear ? spec_.sign_factor() : 0.0;
  const double half_alpha = 0.5 * spec_.alpha;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double theta = cV_[i];
    if (s != 0.0) {
      const double a2 = std::norm(u[i]);
      theta += s * (half_alpha == 1.0 ? a2 : half_alpha == 2.0 ? a2 * a2 : std::pow(a2, half_alpha));
    }
    u[i] *= std::polar(1.0, -dt * theta);
  }
}

void Propagator::step(Field& u, double dt) {
  free_flow(u.values, 0.5 * dt);
  phase(u.values, dt, true);
  free_flow(u.values, 0.5 * dt);
  u.time += dt;
}

void Propagator::step_linear(Field& u, double dt) {
  free_flow(u.values, 0.5 * dt);
  phase(u.values, dt, false);
  free_flow(u.values, 0.5 * dt);
  u.time += dt;
}

Field step_strang(const Field& u, const EquationSpec& spec, double dt) {
  u.require_finite("step_strang");
  Field out = u;
  Propagator(u.grid, spec).step(out, dt);
  out.require_finite("step_strang");
  return out;
}

Field evolve_linear(const Field& u0, const EquationSpec& spec, double t, double dt) {
  u0.require_finite("evolve_linear");
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_spec, "dt must be positive");
  Field u = u0;
  if (t == 0.0) return u;
  const auto steps = static_cast<std::size_t>(std::ceil(std::abs(t) / dt - 1e-9));
  const double h = t / static_cast<double>(steps);
  Propagator prop(u0.grid, spec);
  for (std::size_t i = 0; i < steps; ++i) prop.step_linear(u, h);
  u.time = u0.time + t;
  u.require_finite("evolve_linear");
  return u;
}

std::optional<double> glassey_upper_bound(double V0, double Vdot0, double delta) {
  if (!(V0 > 0.0) || !(delta > 0.0)) return std::nullopt;
  // delta/2 t^2 - Vdot0 t - V0 = 0, written to avoid cancellation.
  const double disc = std::sqrt(Vdot0 * Vdot0 + 2.0 * delta * V0);
  return Vdot0 >= 0.0 ? (Vdot0 + disc) / delta : 2.0 * V0 / (disc - Vdot0);
}

std::optional<double> glassey_delta(const EquationSpec& spec, double mass, double energy, double kinetic,
                                    const ReferenceNorms* ref) {
  if (spec.sign != Nonlinearity::focusing || spec.c < 0.0) return std::nullopt;
  const CriticalityInfo ci = classify_criticality(spec);
  const double d = spec.d, a = spec.alpha;
  switch (ci.regime) {
    case Regime::mass_critical:
      if (energy < 0.0) return -16.0 * energy;
      return std::nullopt;
    case Regime::intercritical: {
      if (energy < 0.0) return -4.0 * d * a * energy;
      if (!ref || !(ref->mass > 0.0)) return std::nullopt;
      const double beta = ci.beta_c;
      // E_0(Q) = (d a - 4) / (2 d a) ||grad Q||^2 by the Pohozaev identities.
      const double EQ = (d * a - 4.0) / (2.0 * d * a) * ref->kinetic;
      const double rho = 1.0 - energy * std::pow(mass, beta) / (EQ * std::pow(ref->mass, beta));
      const double gm = kinetic * std::pow(mass, beta);
      const double gmQ = ref->kinetic * std::pow(ref->mass, beta);
      if (!(rho > 0.0) || !(gm > gmQ)) return std::nullopt;
      return 2.0 * (d * a - 4.0) * rho * ref->kinetic * std::pow(ref->mass / mass, beta);
    }
    case Regime::energy_critical: {
      if (energy < 0.0) return -4.0 * d * a * energy;
      if (!ref) return std::nullopt;
      const double EW = std::isfinite(ref->energy) ? ref->energy : ref->kinetic / d;
      const double rho = 1.0 - energy / EW;
      if (!(rho > 0.0) || !(kinetic > ref->kinetic)) return std::nullopt;
      return 16.0 * rho / (d - 2.0) * ref->kinetic;
    }
    default:
      return std::nullopt;
  }
}

TrajectoryOutcome evolve(const Field& u0, const EquationSpec& spec, const EvolveConfig& cfg) {
  spec.validate();
  cfg.validate();
  TrajectoryOutcome out;
  out.final_field = u0;
  out.final_field.time = 0.0;
  if (!u0.finite()) {
    out.status = RunStatus::invalid;
    out.warnings.push_back("initial field is not finite");
    return out;
  }

  const Observer observe(u0.grid, spec, cfg.R_list, cfg.epsilon_reg);
  Propagator prop(u0.grid, spec, cfg.epsilon_reg);
  Field u = u0;
  u.time = 0.0;

  const ObservableRecord first = observe(u);
  out.records.push_back(first);
  if (cfg.checkpoint_stride > 0) out.checkpoints.push_back(u);
  const double grad0 = std::sqrt(first.kinetic);

  const ReferenceNorms* ref = cfg.reference ? &*cfg.reference : nullptr;
  if (auto delta = glassey_delta(spec, first.mass, first.energy, first.kinetic, ref))
    out.glassey_bound = glassey_upper_bound(first.virial, first.morawetz_x2, *delta);

  Field last_good = u;
  bool grad_warned = false;
  std::size_t n_records = 1;
  double t = 0.0;
  const double t_tol = 1e-12 * std::max(1.0, cfg.t_end);
  auto next_record_time = [&] {
    return cfg.record_interval > 0.0 ? std::min(cfg.t_end, cfg.record_interval * static_cast<double>(n_records))
                                     : cfg.t_end;
  };

  while (t < cfg.t_end - t_tol) {
    if (out.steps >= cfg.max_steps) {
      out.status = RunStatus::invalid;
      out.warnings.push_back("step budget exhausted before t_end");
      break;
    }
    double dt = cfg.dt0;
    if (cfg.adaptivity == Adaptivity::cfl_nonlinear) {
      const double linf = linf_norm(u);
      if (linf > 0.0) dt = std::min(dt, cfg.cfl / std::pow(linf, spec.alpha));
    }
    if (dt < cfg.blowup_dt_floor) {
      const double grad = std::sqrt(gradient_norm_sq(u));
      if (grad >= cfg.blowup_grad_factor * grad0) {
        out.status = RunStatus::blowup_detected;
        out.tstar_estimate = t;
        if (out.records.back().t < t) out.records.push_back(observe(u));
      } else {
        out.status = RunStatus::invalid;
        out.warnings.push_back("step size fell below the floor without gradient growth");
      }
      break;
    }
    const double target = next_record_time();
    const bool lands = cfg.record_interval <= 0.0 || target - t <= dt * (1.0 + 1e-12);
    if (cfg.record_interval > 0.0) dt = std::min(dt, target - t);
    dt = std::min(dt, cfg.t_end - t);

    prop.step(u, dt);
    ++out.steps;
    t = lands && cfg.record_interval > 0.0 ? target : t + dt;
    u.time = t;
    if (!u.finite()) {
      out.status = RunStatus::invalid;
      out.warnings.push_back("field became non-finite at t = " + std::to_string(t));
      u = last_good;
      t = u.time;
      break;
    }

    if (lands || t >= cfg.t_end - t_tol) {
      const ObservableRecord rec = observe(u);
      out.records.push_back(rec);
      ++n_records;
      last_good = u;
      if (cfg.checkpoint_stride > 0 && (n_records - 1) % cfg.checkpoint_stride == 0) out.checkpoints.push_back(u);
      if (!grad_warned && std::sqrt(rec.kinetic) >= cfg.blowup_grad_factor * grad0 && grad0 > 0.0) {
        grad_warned = true;
        out.warnings.push_back("gradient exceeded blowup_grad_factor without step-size collapse at t = " +
                               std::to_string(t));
      }
    }
  }
  out.t_reached = t;
  out.final_field = u;
  return out;
}

}  // namespace nlsrep
