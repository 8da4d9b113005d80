#include "nlsrep/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "nlsrep/error.hpp"
#include "nlsrep/fourier.hpp"

namespace nlsrep {

namespace {

constexpr double kPi = std::numbers::pi;

// A real discretization of (1 - Lap) on which the iteration runs.
struct Discretization {
  GridPtr grid;                // grid the unknowns live on
  std::vector<double> coef;    // weight multiplying |u|^alpha u
  std::vector<double> weight;  // inner-product weights
  int parity = 0;              // +1 even, -1 odd about the origin, 0 free
  std::function<void(std::vector<double>&)> resolvent;
  std::function<void(const std::vector<double>&, std::vector<double>&)> lap;
};

Discretization spectral(GridPtr g) {
  Discretization D;
  D.grid = g;
  D.coef.assign(g->size(), 1.0);
  D.weight.assign(g->quad_weight().begin(), g->quad_weight().end());
  D.resolvent = [g](std::vector<double>& u) {
    std::vector<cplx> w(u.begin(), u.end());
    g->fourier().forward(w);
    const auto k2 = g->k2();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] /= 1.0 + k2[i];
    g->fourier().inverse(w);
    for (std::size_t i = 0; i < w.size(); ++i) u[i] = w[i].real();
  };
  D.lap = [g](const std::vector<double>& u, std::vector<double>& out) {
    std::vector<cplx> w(u.begin(), u.end());
    g->fourier().forward(w);
    const auto k2 = g->k2();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] *= -k2[i];
    g->fourier().inverse(w);
    out.resize(u.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i].real();
  };
  return D;
}

Discretization finite_difference(GridPtr g) {
  Discretization D;
  D.grid = g;
  D.coef.assign(g->size(), 1.0);
  D.weight.assign(g->quad_weight().begin(), g->quad_weight().end());
  auto L = std::make_shared<RadialLaplacian>(*g);
  D.resolvent = [L](std::vector<double>& u) { L->solve(1.0, -1.0, u); };
  D.lap = [L](const std::vector<double>& u, std::vector<double>& out) {
    out.resize(u.size());
    L->apply(std::span<const double>(u), std::span<double>(out));
  };
  return D;
}

struct IterationResult {
  std::vector<double> u;
  double residual = 0.0;
  int iterations = 0;
};

double dot(const std::vector<double>& w, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

IterationResult petviashvili(const Discretization& D, double alpha, std::vector<double> u,
                             const std::vector<double>& residual_scale, const GroundStateOptions& opt) {
  const std::size_t n = u.size();
  const double gamma = (alpha + 1.0) / alpha;
  std::vector<double> nl(n), next(n), lu(n);
  double theta = 1.0;
  double prev_res = std::numeric_limits<double>::infinity();

  auto nonlinear = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = D.coef[i] * std::pow(std::abs(v[i]), alpha) * v[i];
  };

  for (int it = 1; it <= opt.max_iterations; ++it) {
    nonlinear(u, nl);
    D.lap(u, lu);
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) num += D.weight[i] * u[i] * (u[i] - lu[i]);
    const double den = dot(D.weight, u, nl);
    if (!(den > 0.0) || !(num > 0.0))
      throw Error(ErrorCode::no_convergence, "ground-state iterate lost positivity");
    const double S = std::pow(num / den, gamma);

    next = nl;
    D.resolvent(next);
    for (std::size_t i = 0; i < n; ++i) next[i] = (1.0 - theta) * u[i] + theta * S * next[i];
    // Rounding feeds the other parity, which the iteration amplifies.
    if (D.parity != 0) {
      for (std::size_t i = 0; i < n / 2; ++i) {
        const double a = 0.5 * (next[i] + D.parity * next[n - 1 - i]);
        next[i] = a;
        next[n - 1 - i] = D.parity * a;
      }
    }

    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) diff += D.weight[i] * (next[i] - u[i]) * (next[i] - u[i]);
    const double change = std::sqrt(diff / dot(D.weight, next, next));
    u.swap(next);

    nonlinear(u, nl);
    D.lap(u, lu);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      res = std::max(res, std::abs(lu[i] - u[i] + nl[i]) * residual_scale[i]);
    if (!std::isfinite(res)) throw Error(ErrorCode::no_convergence, "ground-state iteration diverged");

    // Oscillation after the burn-in: halve the step.
    if (it > 20 && theta == 1.0 && res > prev_res) theta = 0.5;
    prev_res = res;

    if (res <= opt.tol && change <= opt.change_tol) return {std::move(u), res, it};
  }
  throw Error(ErrorCode::no_convergence, "ground-state iteration did not reach the tolerance");
}

}  // namespace

ReferenceNorms GroundState::norms() const {
  ReferenceNorms r;
  r.d = d;
  r.alpha = alpha;
  r.mass = massQ;
  r.kinetic = kineticQ;
  return r;
}

GroundState solve_ground_state(int d, double alpha, GridPtr grid, double tol) {
  GroundStateOptions opt;
  opt.tol = tol;
  return solve_ground_state(d, alpha, std::move(grid), opt);
}

GroundState solve_ground_state(int d, double alpha, GridPtr grid, const GroundStateOptions& opt) {
  if (!grid) throw Error(ErrorCode::invalid_spec, "ground state needs a grid");
  if (d < 1 || d > 3 || grid->dim() != d)
    throw Error(ErrorCode::invalid_dimension, "grid dimension does not match d");
  if (!(alpha > 0.0)) throw Error(ErrorCode::invalid_spec, "alpha must be positive");
  if (d >= 3 && alpha >= 4.0 / (d - 2))
    throw Error(ErrorCode::invalid_regime, "no H^1 ground state for alpha >= 4/(d-2)");

  GroundState gs;
  gs.d = d;
  gs.alpha = alpha;
  const double p = alpha + 2.0;

  if (!grid->radial() || d == 2) {
    Discretization D = grid->radial() ? finite_difference(grid) : spectral(grid);
    std::vector<double> u0(grid->size());
    const auto r = grid->radius();
    for (std::size_t i = 0; i < u0.size(); ++i) u0[i] = std::exp(-r[i] * r[i]);
    std::vector<double> ones(u0.size(), 1.0);
    IterationResult it = petviashvili(D, alpha, std::move(u0), ones, opt);
    gs.profile = Field(grid, std::vector<cplx>(it.u.begin(), it.u.end()));
    gs.residual = it.residual;
    gs.iterations = it.iterations;
    gs.massQ = mass(gs.profile);
    gs.kineticQ = gradient_norm_sq(gs.profile);
    gs.lpq = lp_integral(gs.profile, p);
  } else {
    // Extension onto [-r_max, r_max): even Q for d = 1, odd v = r Q for d = 3.
    const std::size_t nr = grid->n();
    GridPtr ext = make_grid(1, 2 * nr, grid->extent(), GridMode::cartesian);
    Discretization D = spectral(ext);
    D.parity = d == 1 ? 1 : -1;
    const auto x = ext->axis_nodes();
    std::vector<double> u0(ext->size()), scale(ext->size(), 1.0);
    for (std::size_t i = 0; i < u0.size(); ++i) {
      const double g = std::exp(-x[i] * x[i]);
      u0[i] = d == 1 ? g : x[i] * g;
      if (d == 3) {
        D.coef[i] = std::pow(std::abs(x[i]), -alpha);
        scale[i] = 1.0 / std::abs(x[i]);
      }
    }
    IterationResult it = petviashvili(D, alpha, std::move(u0), scale, opt);
    gs.residual = it.residual;
    gs.iterations = it.iterations;

    Field v(ext, std::vector<cplx>(it.u.begin(), it.u.end()));
    std::vector<cplx> q(nr);
    const auto r = grid->radius();
    for (std::size_t j = 0; j < nr; ++j) q[j] = d == 1 ? it.u[nr + j] : it.u[nr + j] / r[j];
    gs.profile = Field(grid, std::move(q));

    const double jac = d == 1 ? 1.0 : 2.0 * kPi;
    gs.massQ = jac * mass(v);
    gs.kineticQ = jac * gradient_norm_sq(v);
    double acc = 0.0;
    const double h = ext->spacing();
    for (std::size_t i = 0; i < it.u.size(); ++i) acc += D.coef[i] * std::pow(std::abs(it.u[i]), p);
    gs.lpq = jac * h * acc;
  }
  gs.cGN = sharp_gn_constant(gs, d, alpha);
  return gs;
}

double ground_state_1d_exact(double alpha, double x) {
  const double s = 1.0 / std::cosh(0.5 * alpha * x);
  return std::pow(0.5 * (alpha + 2.0), 1.0 / alpha) * std::pow(s, 2.0 / alpha);
}

double sharp_gn_constant(const GroundState& gs, int d, double alpha) {
  const double ek = d * alpha / 4.0;
  const double em = (4.0 - (d - 2) * alpha) / 4.0;
  return gs.lpq / (std::pow(gs.kineticQ, ek) * std::pow(gs.massQ, em));
}

double sharp_gn_constant_closed_form(const GroundState& gs, int d, double alpha) {
  if (std::abs(alpha - 4.0 / d) <= 1e-12 * alpha) return (d + 2.0) / d * std::pow(gs.massQ, -2.0 / d);
  const double beta = beta_c_direct(d, alpha);
  const double gm = std::sqrt(gs.kineticQ) * std::pow(gs.massQ, 0.5 * beta);
  return 2.0 * (alpha + 2.0) / (d * alpha) * std::pow(gm, 2.0 - 0.5 * d * alpha);
}

InequalityCheck gn_inequality_oracle(const Field& f, const GroundState& gs) {
  f.require_finite("gn_inequality_oracle");
  const int d = gs.d;
  const double a = gs.alpha;
  InequalityCheck c;
  c.lhs = lp_integral(f, a + 2.0);
  const double K = gradient_norm_sq(f);
  const double M = mass(f);
  c.rhs = gs.cGN * std::pow(K, d * a / 4.0) * std::pow(M, (4.0 - (d - 2) * a) / 4.0);
  c.holds = c.lhs <= c.rhs * (1.0 + 1e-12);
  return c;
}

InequalityCheck hardy_oracle(const Field& f) {
  if (!f.grid || f.grid->dim() != 3) throw Error(ErrorCode::wrong_dimension, "Hardy oracle is for d = 3");
  InequalityCheck c;
  c.lhs = 0.25 * weighted_norm(f, [](double r) { return 1.0 / (r * r); });
  c.rhs = gradient_norm_sq(f);
  c.holds = c.lhs <= c.rhs;
  return c;
}

double bubble_profile(double r) { return 1.0 / std::sqrt(1.0 + r * r / 3.0); }

namespace {

struct BubbleNorms {
  double kinetic;
  double l6;
};

// Midpoint quadrature of 4 pi int |W'|^2 r^2 and 4 pi int W^6 r^2 on
// [0, n dr], plus the leading terms of the tails beyond.
BubbleNorms bubble_norms(double dr, std::size_t n) {
  double k = 0.0, l = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double r = (j + 0.5) * dr;
    const double b = 1.0 + r * r / 3.0;
    const double r2 = r * r;
    k += r2 * r2 / 9.0 / (b * b * b);
    l += r2 / (b * b * b);
  }
  const double R = n * dr;
  return {4.0 * kPi * (dr * k + 3.0 / R), 4.0 * kPi * (dr * l + 9.0 / (R * R * R))};
}

}  // namespace

ReferenceNorms Bubble::norms() const {
  ReferenceNorms r;
  r.d = 3;
  r.alpha = 4.0;
  r.kinetic = kineticW;
  r.energy = energyW;
  return r;
}

Bubble make_bubble(int d, GridPtr grid) {
  if (d != 3) throw Error(ErrorCode::wrong_dimension, "the bubble is implemented for d = 3");
  if (!grid || grid->dim() != 3) throw Error(ErrorCode::wrong_dimension, "bubble needs a d = 3 grid");
  if (!grid->radial()) throw Error(ErrorCode::not_radial, "bubble needs a radial grid");
  Bubble B;
  B.profile = sample_radial(grid, [](double r) { return cplx(bubble_profile(r), 0.0); });
  B.r_max = grid->extent();
  const BubbleNorms a = bubble_norms(grid->spacing(), grid->n());
  const BubbleNorms b = bubble_norms(grid->spacing(), 2 * grid->n());
  B.kineticW = a.kinetic;
  B.lqW = a.l6;
  B.cSE = 1.0 / (a.kinetic * a.kinetic);
  B.energyW = 0.5 * a.kinetic - a.l6 / 6.0;
  // err(R) = |I(R) - I(2R)| / (1 - 2^{-p}) <= 2 |I(R) - I(2R)| for any tail
  // decaying like R^{-p}, p >= 1.
  B.truncation_kinetic = 2.0 * std::abs(a.kinetic - b.kinetic);
  B.truncation_lq = 2.0 * std::abs(a.l6 - b.l6);
  return B;
}

}  // namespace nlsrep
