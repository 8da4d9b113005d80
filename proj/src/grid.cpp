#include "nlsrep/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "nlsrep/error.hpp"
#include "nlsrep/fourier.hpp"
#include "nlsrep/kernels.hpp"

namespace nlsrep {

std::string_view to_string(GridMode m) { return m == GridMode::cartesian ? "cartesian" : "radial"; }

GridMode parse_grid_mode(std::string_view s) {
  if (s == "cartesian") return GridMode::cartesian;
  if (s == "radial") return GridMode::radial;
  throw Error(ErrorCode::config_invalid, "unknown grid mode '" + std::string(s) + "'");
}

namespace {

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double unit_sphere_area(int d) {
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    default: return 4.0 * std::numbers::pi;
  }
}

}  // namespace

double Grid::sphere_area() const noexcept { return unit_sphere_area(d_); }

std::shared_ptr<const Grid> make_grid(int d, std::size_t n, double extent, GridMode mode) {
  if (d < 1 || d > 3) throw Error(ErrorCode::invalid_dimension, "grids support d = 1, 2, 3");
  if (n < 8 || !power_of_two(n)) throw Error(ErrorCode::resolution_too_small, "n must be a power of two >= 8");
  if (!(extent > 0.0) || !std::isfinite(extent))
    throw Error(ErrorCode::resolution_too_small, "box extent must be positive");

  std::shared_ptr<Grid> g(new Grid);
  g->d_ = d;
  g->mode_ = mode;
  g->n_ = n;
  g->extent_ = extent;

  if (mode == GridMode::radial) {
    const double dr = extent / static_cast<double>(n);
    const double omega = unit_sphere_area(d);
    g->h_ = dr;
    g->axis_.resize(n);
    g->radius_.resize(n);
    g->weight_.resize(n);
    g->face_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double r = (static_cast<double>(j) + 0.5) * dr;
      g->axis_[j] = r;
      g->radius_[j] = r;
      g->weight_[j] = omega * std::pow(r, d - 1) * dr;
      g->face_[j] = std::pow((static_cast<double>(j) + 1.0) * dr, d - 1);
    }
    return g;
  }

  const double dx = 2.0 * extent / static_cast<double>(n);
  g->h_ = dx;
  g->axis_.resize(n);
  g->k_.resize(n);
  const double dk = std::numbers::pi / extent;
  for (std::size_t i = 0; i < n; ++i) {
    g->axis_[i] = -extent + (static_cast<double>(i) + 0.5) * dx;
    const auto si = static_cast<std::ptrdiff_t>(i);
    const auto sn = static_cast<std::ptrdiff_t>(n);
    g->k_[i] = dk * static_cast<double>(si < sn / 2 ? si : si - sn);
  }

  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= n;
  g->radius_.resize(total);
  g->k2_.resize(total);
  g->weight_.assign(total, std::pow(dx, d));
  for (std::size_t node = 0; node < total; ++node) {
    std::size_t rest = node;
    double r2 = 0.0, k2 = 0.0;
    for (int a = d - 1; a >= 0; --a) {
      const std::size_t ia = rest % n;
      rest /= n;
      r2 += g->axis_[ia] * g->axis_[ia];
      k2 += g->k_[ia] * g->k_[ia];
    }
    g->radius_[node] = std::sqrt(r2);
    g->k2_[node] = k2;
  }
  g->fourier_ = std::make_shared<Fourier>(d, n);
  return g;
}

double Grid::coordinate(std::size_t node, int axis) const {
  if (mode_ == GridMode::radial) return axis == 0 ? radius_[node] : 0.0;
  std::size_t stride = 1;
  for (int a = d_ - 1; a > axis; --a) stride *= n_;
  return axis_[(node / stride) % n_];
}

const Fourier& Grid::fourier() const {
  if (!fourier_) throw Error(ErrorCode::invalid_field, "radial grids have no Fourier transform");
  return *fourier_;
}

bool Grid::same_shape(const Grid& o) const noexcept {
  return d_ == o.d_ && mode_ == o.mode_ && n_ == o.n_ && extent_ == o.extent_;
}

Field::Field(GridPtr g, std::vector<cplx> v, double t) : grid(std::move(g)), values(std::move(v)), time(t) {
  if (!grid || values.size() != grid->size())
    throw Error(ErrorCode::invalid_field, "field size does not match its grid");
}

bool Field::finite() const noexcept {
  return std::all_of(values.begin(), values.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

void Field::require_finite(std::string_view where) const {
  if (!finite()) throw Error(ErrorCode::invalid_field, "non-finite value in " + std::string(where));
}

Field sample(GridPtr grid, const std::function<cplx(double, double, double)>& f) {
  Field out(grid);
  const int d = grid->dim();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (grid->radial()) {
      out.values[i] = f(grid->radius()[i], 0.0, 0.0);
    } else {
      const double x = grid->coordinate(i, 0);
      const double y = d > 1 ? grid->coordinate(i, 1) : 0.0;
      const double z = d > 2 ? grid->coordinate(i, 2) : 0.0;
      out.values[i] = f(x, y, z);
    }
  }
  return out;
}

Field sample_radial(GridPtr grid, const std::function<cplx(double)>& f) {
  Field out(grid);
  const auto r = grid->radius();
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = f(r[i]);
  return out;
}

double mass(const Field& f) { return kernels::weighted_abs2_sum(f.values, f.grid->quad_weight()); }

namespace {

double radial_gradient_norm_sq(const Field& f) {
  const Grid& g = *f.grid;
  const auto face = g.face_weight();
  const std::size_t n = g.n();
  const auto& u = f.values;
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) acc += face[j] * std::norm(u[j + 1] - u[j]);
  acc += 2.0 * face[n - 1] * std::norm(u[n - 1]);
  return g.sphere_area() * acc / g.spacing();
}

}  // namespace

double gradient_norm_sq(const Field& f) {
  f.require_finite("gradient_norm_sq");
  const Grid& g = *f.grid;
  if (g.radial()) return radial_gradient_norm_sq(f);
  std::vector<cplx> hat = f.values;
  g.fourier().forward(hat);
  // Parseval with the unnormalized DFT: sum |u|^2 dx^d = dx^d / N sum |u_hat|^2.
  const double scale = std::pow(g.spacing(), g.dim()) / static_cast<double>(g.size());
  return scale * kernels::weighted_abs2_sum(hat, g.k2());
}

double weighted_norm(const Field& f, std::span<const double> w) {
  f.require_finite("weighted_norm");
  const auto q = f.grid->quad_weight();
  std::vector<double> wq(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) wq[i] = w[i] * q[i];
  return kernels::weighted_abs2_sum(f.values, wq);
}

double weighted_norm(const Field& f, const std::function<double(double)>& radial_weight) {
  const auto r = f.grid->radius();
  std::vector<double> w(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) w[i] = radial_weight(r[i]);
  return weighted_norm(f, w);
}

double lp_integral(const Field& f, double p) {
  const auto q = f.grid->quad_weight();
  if (p == 2.0) return kernels::weighted_abs2_sum(f.values, q);
  if (p == 4.0) return kernels::weighted_abs4_sum(f.values, q);
  const double half = 0.5 * p;
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a2 = std::norm(f.values[i]);
    if (a2 > 0.0) acc += q[i] * std::pow(a2, half);
  }
  return acc;
}

double linf_norm(const Field& f) { return std::sqrt(kernels::max_abs2(f.values)); }

double boundary_shell_fraction(const Field& f) {
  const Grid& g = *f.grid;
  const double total = mass(f);
  if (total == 0.0) return 0.0;
  const double cut = 0.9 * g.extent();
  const auto q = g.quad_weight();
  double shell = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double m = 0.0;
    if (g.radial()) {
      m = g.radius()[i];
    } else {
      for (int a = 0; a < g.dim(); ++a) m = std::max(m, std::abs(g.coordinate(i, a)));
    }
    if (m > cut) shell += q[i] * std::norm(f.values[i]);
  }
  return shell / total;
}

std::vector<std::vector<cplx>> gradient(const Field& f) {
  const Grid& g = *f.grid;
  const std::size_t n = g.n();
  if (g.radial()) {
    std::vector<cplx> du(n);
    const auto& u = f.values;
    const double inv = 1.0 / (2.0 * g.spacing());
    for (std::size_t j = 0; j < n; ++j) {
      const cplx left = j == 0 ? u[0] : u[j - 1];
      const cplx right = j + 1 == n ? -u[n - 1] : u[j + 1];
      du[j] = (right - left) * inv;
    }
    return {std::move(du)};
  }

  std::vector<cplx> hat = f.values;
  g.fourier().forward(hat);
  const auto k = g.wavenumbers();
  std::vector<std::vector<cplx>> out;
  out.reserve(g.dim());
  for (int axis = 0; axis < g.dim(); ++axis) {
    std::size_t stride = 1;
    for (int a = g.dim() - 1; a > axis; --a) stride *= n;
    std::vector<cplx> d(hat.size());
    for (std::size_t i = 0; i < hat.size(); ++i) {
      const std::size_t ia = (i / stride) % n;
      // The Nyquist mode has no sign, so it cannot carry an odd derivative.
      const double kk = ia == n / 2 ? 0.0 : k[ia];
      d[i] = cplx(-kk * hat[i].imag(), kk * hat[i].real());
    }
    g.fourier().inverse(d);
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<cplx> laplacian(const Field& f) {
  const Grid& g = *f.grid;
  std::vector<cplx> out(f.size());
  if (g.radial()) {
    RadialLaplacian(g).apply(f.values, out);
    return out;
  }
  out = f.values;
  g.fourier().forward(out);
  const auto k2 = g.k2();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= -k2[i];
  g.fourier().inverse(out);
  return out;
}

std::vector<double> inverse_power(const Grid& g, double sigma, double eps) {
  const auto r = g.radius();
  std::vector<double> v(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) v[i] = std::pow(std::max(r[i], eps), -sigma);
  return v;
}

std::vector<double> potential_table(const Grid& g, double sigma, double eps) {
  std::vector<double> v = inverse_power(g, sigma, eps);
  if (eps > 0.0 || (!g.radial() && g.dim() > 1)) return v;
  // Hurwitz zeta at 1/2 through (2^s - 1) zeta(s).
  const double s = sigma + 1.0 - g.dim();
  const double hz = (std::pow(2.0, s) - 1.0) * std::riemann_zeta(s);
  const double shift = std::pow(2.0, g.dim() - 1) * std::pow(g.spacing(), -sigma) * hz;
  if (g.radial()) {
    v[0] -= shift;
  } else {
    const std::size_t n = g.n();
    v[n / 2 - 1] -= shift;
    v[n / 2] -= shift;
  }
  return v;
}

RadialLaplacian::RadialLaplacian(const Grid& g) {
  if (!g.radial()) throw Error(ErrorCode::not_radial, "RadialLaplacian needs a radial grid");
  const std::size_t n = g.n();
  const double h2 = g.spacing() * g.spacing();
  const auto face = g.face_weight();
  const auto r = g.radius();
  const int d = g.dim();
  lower_.assign(n, 0.0);
  diag_.assign(n, 0.0);
  upper_.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double vol = std::pow(r[j], d - 1) * h2;
    const double left = j == 0 ? 0.0 : face[j - 1];
    const double right = face[j];
    if (j + 1 < n) {
      upper_[j] = right / vol;
      diag_[j] -= right / vol;
    } else {
      // Ghost value -u_{n-1} puts the zero exactly on the r_max face.
      diag_[j] -= 2.0 * right / vol;
    }
    if (j > 0) {
      lower_[j] = left / vol;
      diag_[j] -= left / vol;
    }
  }
}

namespace {

template <class T>
void tri_apply(std::span<const double> lo, std::span<const double> di, std::span<const double> up,
               std::span<const T> u, std::span<T> out) {
  const std::size_t n = u.size();
  for (std::size_t j = 0; j < n; ++j) {
    T acc = di[j] * u[j];
    if (j > 0) acc += lo[j] * u[j - 1];
    if (j + 1 < n) acc += up[j] * u[j + 1];
    out[j] = acc;
  }
}

template <class T>
void tri_solve(const std::vector<double>& lo, const std::vector<double>& di, const std::vector<double>& up, T a,
               T b, std::span<T> x, std::vector<T>& c) {
  const std::size_t n = x.size();
  c.resize(n);
  T beta = a + b * di[0];
  c[0] = b * up[0] / beta;
  x[0] = x[0] / beta;
  for (std::size_t j = 1; j < n; ++j) {
    const T l = b * lo[j];
    beta = a + b * di[j] - l * c[j - 1];
    c[j] = (j + 1 < n) ? b * up[j] / beta : T(0);
    x[j] = (x[j] - l * x[j - 1]) / beta;
  }
  for (std::size_t j = n - 1; j-- > 0;) x[j] -= c[j] * x[j + 1];
}

}  // namespace

void RadialLaplacian::apply(std::span<const cplx> u, std::span<cplx> out) const {
  tri_apply<cplx>(lower_, diag_, upper_, u, out);
}

void RadialLaplacian::apply(std::span<const double> u, std::span<double> out) const {
  tri_apply<double>(lower_, diag_, upper_, u, out);
}

void RadialLaplacian::solve(cplx a, cplx b, std::span<cplx> rhs) const {
  tri_solve<cplx>(lower_, diag_, upper_, a, b, rhs, scratch_c_);
}

void RadialLaplacian::solve(double a, double b, std::span<double> rhs) const {
  tri_solve<double>(lower_, diag_, upper_, a, b, rhs, scratch_r_);
}

}  // namespace nlsrep
