#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nlsrep/kernels.hpp"

using namespace nlsrep::kernels;

namespace {

struct Data {
  std::vector<cplx> u, v;
  std::vector<double> w;
};

Data make(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 2.0);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.u.emplace_back(g(rng), g(rng));
    d.v.emplace_back(g(rng), g(rng));
    d.w.push_back(pos(rng));
  }
  return d;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300}); }

void compare(const KernelTable& a, const KernelTable& b) {
  for (std::size_t n : {0ul, 1ul, 2ul, 3ul, 4ul, 5ul, 7ul, 8ul, 9ul, 15ul, 16ul, 17ul, 31ul, 100ul, 1023ul, 4096ul}) {
    CAPTURE(n);
    const Data d = make(n, static_cast<unsigned>(n) + 1);
    const double tol = 1e-13;
    CHECK(close(a.abs2_sum(d.u.data(), n), b.abs2_sum(d.u.data(), n), tol));
    CHECK(close(a.weighted_abs2_sum(d.u.data(), d.w.data(), n), b.weighted_abs2_sum(d.u.data(), d.w.data(), n), tol));
    CHECK(close(a.weighted_abs4_sum(d.u.data(), d.w.data(), n), b.weighted_abs4_sum(d.u.data(), d.w.data(), n), tol));
    CHECK(a.max_abs2(d.u.data(), n) == doctest::Approx(b.max_abs2(d.u.data(), n)).epsilon(1e-15));
    // Cancellation makes the cross term small relative to its parts.
    const double scale = a.weighted_abs2_sum(d.u.data(), d.w.data(), n) + a.weighted_abs2_sum(d.v.data(), d.w.data(), n);
    CHECK(std::abs(a.weighted_im_cross(d.u.data(), d.v.data(), d.w.data(), n) -
                   b.weighted_im_cross(d.u.data(), d.v.data(), d.w.data(), n)) <= tol * std::max(scale, 1.0));

    std::vector<cplx> x = d.u, y = d.u;
    a.mul_complex(x.data(), d.v.data(), n);
    b.mul_complex(y.data(), d.v.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(x[i] - y[i]) <= 1e-15 * (std::abs(x[i]) + 1e-300) * 4);

    x = d.u;
    y = d.u;
    a.mul_real(x.data(), d.w.data(), n);
    b.mul_real(y.data(), d.w.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == y[i]);

    std::vector<double> p(n), q(n);
    a.abs2(d.u.data(), p.data(), n);
    b.abs2(d.u.data(), q.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(p[i], q[i], 1e-15));
  }
}

}  // namespace

TEST_CASE("scalar reference matches the obvious loops") {
  const KernelTable& s = scalar_table();
  const Data d = make(257, 99);
  double a2 = 0.0, wa2 = 0.0, wa4 = 0.0, mx = 0.0, im = 0.0;
  for (std::size_t i = 0; i < 257; ++i) {
    const double n2 = std::norm(d.u[i]);
    a2 += n2;
    wa2 += d.w[i] * n2;
    wa4 += d.w[i] * n2 * n2;
    mx = std::max(mx, n2);
    im += d.w[i] * std::imag(std::conj(d.u[i]) * d.v[i]);
  }
  CHECK(s.abs2_sum(d.u.data(), 257) == doctest::Approx(a2).epsilon(1e-14));
  CHECK(s.weighted_abs2_sum(d.u.data(), d.w.data(), 257) == doctest::Approx(wa2).epsilon(1e-14));
  CHECK(s.weighted_abs4_sum(d.u.data(), d.w.data(), 257) == doctest::Approx(wa4).epsilon(1e-14));
  CHECK(s.max_abs2(d.u.data(), 257) == mx);
  CHECK(s.weighted_im_cross(d.u.data(), d.v.data(), d.w.data(), 257) == doctest::Approx(im).epsilon(1e-12));
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const KernelTable* avx = avx2_table();
  if (avx == nullptr) {
    MESSAGE("AVX2 kernels unavailable on this host; equivalence skipped");
    return;
  }
  CHECK(avx->name != scalar_table().name);
  compare(scalar_table(), *avx);
}

TEST_CASE("reductions are reproducible bit for bit") {
  const Data d = make(10007, 5);
  const KernelTable& t = active();
  const double first = t.weighted_abs4_sum(d.u.data(), d.w.data(), d.u.size());
  for (int rep = 0; rep < 5; ++rep) CHECK(t.weighted_abs4_sum(d.u.data(), d.w.data(), d.u.size()) == first);
}

TEST_CASE("span wrappers dispatch to the active table") {
  const Data d = make(64, 3);
  CHECK(abs2_sum(d.u) == active().abs2_sum(d.u.data(), 64));
  CHECK(max_abs2(d.u) == active().max_abs2(d.u.data(), 64));
}
