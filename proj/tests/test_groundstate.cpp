#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nlsrep/error.hpp"
#include "nlsrep/groundstate.hpp"

using namespace nlsrep;

namespace {

double pohozaev_kinetic(int d, double a) { return d * a / (2.0 * (a + 2.0)); }
double pohozaev_mass(int d, double a) { return (4.0 - (d - 2.0) * a) / (2.0 * (a + 2.0)); }

}  // namespace

TEST_CASE("1D ground state against sech closed form") {
  for (double alpha : {2.0, 4.0, 6.0}) {
    CAPTURE(alpha);
    for (auto mode : {GridMode::radial, GridMode::cartesian}) {
      auto g = make_grid(1, 2048, 24.0, mode);
      const auto gs = solve_ground_state(1, alpha, g, 1e-11);
      double err = 0.0;
      for (std::size_t i = 0; i < g->size(); ++i)
        err = std::max(err, std::abs(gs.profile.values[i] - ground_state_1d_exact(alpha, g->radius()[i])));
      CHECK(err < 1e-9);
      CHECK(gs.residual <= 1e-11);
    }
  }
  // Mass of the quintic ground state: sqrt(3) int sech(2x) dx = sqrt(3) pi / 2.
  auto g = make_grid(1, 2048, 24.0, GridMode::radial);
  CHECK(solve_ground_state(1, 4.0, g).massQ == doctest::Approx(std::sqrt(3.0) * M_PI / 2.0).epsilon(1e-10));
}

TEST_CASE("3D radial cubic ground state satisfies Pohozaev") {
  auto g = make_grid(3, 2048, 24.0, GridMode::radial);
  const auto gs = solve_ground_state(3, 2.0, g, 1e-10);
  CHECK(gs.residual <= 1e-10);
  CHECK(gs.kineticQ == doctest::Approx(pohozaev_kinetic(3, 2.0) * gs.lpq).epsilon(1e-7));
  CHECK(gs.massQ == doctest::Approx(pohozaev_mass(3, 2.0) * gs.lpq).epsilon(1e-7));
  CHECK(gs.profile.values[0].real() > gs.profile.values[10].real());
}

TEST_CASE("2D Townes soliton mass") {
  auto g = make_grid(2, 128, 12.0, GridMode::cartesian);
  const auto gs = solve_ground_state(2, 2.0, g, 1e-10);
  CHECK(gs.massQ == doctest::Approx(11.700896).epsilon(2e-6));
  CHECK(std::abs(gs.energy()) < 1e-8 * gs.kineticQ);
}

TEST_CASE("sharp GN constant: ratio and closed form agree") {
  struct Case {
    int d;
    double alpha;
    GridMode mode;
    std::size_t n;
    double L;
  };
  for (auto c : {Case{1, 4.0, GridMode::radial, 2048, 24.0}, Case{1, 6.0, GridMode::radial, 2048, 24.0},
                 Case{3, 2.0, GridMode::radial, 2048, 24.0}, Case{2, 2.0, GridMode::cartesian, 128, 12.0}}) {
    CAPTURE(c.d);
    CAPTURE(c.alpha);
    const auto gs = solve_ground_state(c.d, c.alpha, make_grid(c.d, c.n, c.L, c.mode), 1e-10);
    CHECK(gs.cGN == doctest::Approx(sharp_gn_constant_closed_form(gs, c.d, c.alpha)).epsilon(1e-7));
    CHECK(gs.cGN == doctest::Approx(sharp_gn_constant(gs, c.d, c.alpha)).epsilon(1e-14));
  }
}

TEST_CASE("GN oracle holds off the optimizer and is tight at Q") {
  auto g = make_grid(3, 2048, 24.0, GridMode::radial);
  const auto gs = solve_ground_state(3, 2.0, g);
  const auto at_q = gn_inequality_oracle(gs.profile, gs);
  // Q is solved spectrally, the oracle differentiates by finite differences.
  CHECK(at_q.lhs == doctest::Approx(at_q.rhs).epsilon(1e-5));
  for (double a : {0.3, 1.0, 3.0}) {
    const auto gauss = sample_radial(g, [a](double r) { return cplx(std::exp(-a * r * r), 0.0); });
    const auto chk = gn_inequality_oracle(gauss, gs);
    CHECK(chk.holds);
    CHECK(chk.lhs < chk.rhs);
  }
}

TEST_CASE("Hardy oracle") {
  auto g = make_grid(3, 1024, 20.0, GridMode::radial);
  const auto f = sample_radial(g, [](double r) { return cplx(std::exp(-r * r), 0.0); });
  const auto h = hardy_oracle(f);
  CHECK(h.holds);
  // int |x|^-2 e^{-2r^2} = 4 pi sqrt(pi/2)/2; ||grad||^2 = 3 pi^{3/2}/(2 sqrt 2).
  CHECK(h.lhs == doctest::Approx(0.25 * 2.0 * M_PI * std::sqrt(M_PI / 2.0)).epsilon(1e-5));
  CHECK(h.rhs == doctest::Approx(3.0 * std::pow(M_PI, 1.5) / (2.0 * std::sqrt(2.0))).epsilon(1e-4));
  CHECK_THROWS_AS(hardy_oracle(sample_radial(make_grid(2, 64, 10.0, GridMode::radial), [](double) { return 1.0; })),
                  Error);
}

TEST_CASE("Aubin-Talenti bubble") {
  const double KW = 3.0 * std::sqrt(3.0) * M_PI * M_PI / 4.0;
  CHECK(bubble_profile(0.0) == 1.0);
  CHECK(bubble_profile(3.0) == doctest::Approx(0.5));
  auto g = make_grid(3, 8192, 200.0, GridMode::radial);
  const auto b = make_bubble(3, g);
  CHECK(std::abs(b.kineticW - KW) <= std::max(b.truncation_kinetic, 1e-6 * KW));
  CHECK(std::abs(b.lqW - KW) <= std::max(b.truncation_lq, 1e-6 * KW));
  CHECK(b.energyW == doctest::Approx(KW / 3.0).epsilon(1e-5));
  CHECK(b.cSE == doctest::Approx(std::pow(b.kineticW, -2.0)).epsilon(1e-12));
  CHECK(b.truncation_estimate() < 1e-3);
  CHECK(b.norms().kinetic == b.kineticW);
  CHECK_THROWS_AS(make_bubble(3, make_grid(3, 64, 10.0, GridMode::cartesian)), Error);
}

TEST_CASE("ground-state errors") {
  auto g3 = make_grid(3, 256, 20.0, GridMode::radial);
  try {
    solve_ground_state(3, 4.0, g3);
    FAIL("expected invalid_regime");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_regime);
  }
  try {
    solve_ground_state(1, 2.0, g3);
    FAIL("expected invalid_dimension");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_dimension);
  }
  GroundStateOptions opt;
  opt.max_iterations = 2;
  opt.tol = 1e-14;
  try {
    solve_ground_state(3, 2.0, g3, opt);
    FAIL("expected no_convergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_convergence);
  }
}
