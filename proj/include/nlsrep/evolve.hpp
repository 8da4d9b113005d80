#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlsrep/domain.hpp"
#include "nlsrep/grid.hpp"
#include "nlsrep/observables.hpp"

namespace nlsrep {

enum class Adaptivity { fixed, cfl_nonlinear };
std::string_view to_string(Adaptivity a);
Adaptivity parse_adaptivity(std::string_view s);

struct EvolveConfig {
  double dt0 = 1e-3;
  double t_end = 1.0;
  Adaptivity adaptivity = Adaptivity::fixed;
  double cfl = 0.1;                  // dt <= cfl / ||u||_inf^alpha
  double blowup_grad_factor = 100.0;
  double blowup_dt_floor = 1e-9;
  double record_interval = 0.0;      // 0 records every step
  std::size_t checkpoint_stride = 0; // in records; 0 disables
  std::size_t max_steps = 100000000;
  std::vector<double> R_list;
  double epsilon_reg = 0.0;
  /// Q or W norms for the Glassey bound when E(u0) >= 0.
  std::optional<ReferenceNorms> reference;

  /// Throws invalid_spec.
  void validate() const;
};

enum class RunStatus { completed, blowup_detected, invalid };
std::string_view to_string(RunStatus s);

struct TrajectoryOutcome {
  RunStatus status = RunStatus::completed;
  double t_reached = 0.0;
  std::optional<double> tstar_estimate;
  std::optional<double> glassey_bound;
  std::vector<ObservableRecord> records;
  std::vector<Field> checkpoints;  // every checkpoint_stride-th record
  Field final_field;               // last good field
  std::vector<std::string> warnings;
  std::size_t steps = 0;
};

/// Strang splitting A(dt/2) B(dt) A(dt/2) with A the free flow (Fourier
/// multiplier, or Crank-Nicolson on radial grids) and B the exact pointwise
/// phase u exp(-i dt (c V + s |u|^alpha)). Negative dt runs backwards.
class Propagator {
 public:
  Propagator(GridPtr grid, const EquationSpec& spec, double epsilon_reg = 0.0);
  ~Propagator();
  Propagator(const Propagator&) = delete;
  Propagator& operator=(const Propagator&) = delete;

  void step(Field& u, double dt);
  /// Same splitting with the nonlinear phase removed.
  void step_linear(Field& u, double dt);

  const EquationSpec& spec() const noexcept { return spec_; }

 private:
  void free_flow(std::vector<cplx>& u, double tau);
  void phase(std::vector<cplx>& u, double dt, bool nonlinear);

  GridPtr grid_;
  EquationSpec spec_;
  std::vector<double> cV_;
  struct Cache;
  Cache* cache_;
};

/// One Strang step on a copy. Throws invalid_field if the result is not finite.
Field step_strang(const Field& u, const EquationSpec& spec, double dt);

/// Integrates to t_end or to detected blow-up. Never throws on mid-run
/// failures: the outcome reports status invalid with the last good field.
TrajectoryOutcome evolve(const Field& u0, const EquationSpec& spec, const EvolveConfig& cfg);

/// e^{-i t H_c} u0 by the linear splitting with ceil(|t| / dt) equal steps;
/// t may be negative.
Field evolve_linear(const Field& u0, const EquationSpec& spec, double t, double dt);

/// Positive root of V0 + Vdot0 t - delta t^2 / 2 (nullopt unless V0 > 0 and
/// delta > 0).
std::optional<double> glassey_upper_bound(double V0, double Vdot0, double delta);

/// Concavity constant delta with d^2 V/dt^2 <= -delta for focusing data
/// under the blow-up conditions, c >= 0; nullopt when no bound applies.
///   mass-critical, E < 0:            -16 E
///   inter/energy-critical, E < 0:    -4 d alpha E
///   intercritical, E >= 0:           2(d a - 4) rho K_Q (M_Q / M)^beta,
///                                    rho = 1 - E M^beta / (E_Q M_Q^beta)
///   energy-critical, E >= 0:         16 rho / (d - 2) K_W, rho = 1 - E / E_0(W)
/// The E >= 0 cases need `ref` and the gradient side of the blow-up
/// condition (`kinetic` is ||grad u0||^2).
std::optional<double> glassey_delta(const EquationSpec& spec, double mass, double energy, double kinetic,
                                    const ReferenceNorms* ref = nullptr);

}  // namespace nlsrep
