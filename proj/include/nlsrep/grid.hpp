#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace nlsrep {

using cplx = std::complex<double>;

enum class GridMode { cartesian, radial };

std::string_view to_string(GridMode m);
GridMode parse_grid_mode(std::string_view s);

class Fourier;

/// Cell-centred discretization. Cartesian grids cover [-L, L)^d with n nodes
/// per axis at -L + (i + 1/2) dx; radial grids cover [0, r_max] with n_r nodes
/// at (j + 1/2) dr. No node ever sits at the origin, so |x|^{-sigma} is finite
/// everywhere. Immutable once built; share it through shared_ptr.
class Grid {
 public:
  int dim() const noexcept { return d_; }
  GridMode mode() const noexcept { return mode_; }
  bool radial() const noexcept { return mode_ == GridMode::radial; }
  /// Points per axis (cartesian) or number of radial cells.
  std::size_t n() const noexcept { return n_; }
  /// L for cartesian grids, r_max for radial ones.
  double extent() const noexcept { return extent_; }
  double spacing() const noexcept { return h_; }
  std::size_t size() const noexcept { return radius_.size(); }

  /// |x| at every node.
  std::span<const double> radius() const noexcept { return radius_; }
  /// Quadrature weight of every node: dx^d, or omega_{d-1} r^{d-1} dr.
  std::span<const double> quad_weight() const noexcept { return weight_; }
  /// Node coordinates along one axis (cartesian) or the radii (radial).
  std::span<const double> axis_nodes() const noexcept { return axis_; }

  /// Discrete Fourier wavenumbers along one axis in FFT order, and |k|^2 at
  /// every node. Cartesian grids only.
  std::span<const double> wavenumbers() const noexcept { return k_; }
  std::span<const double> k2() const noexcept { return k2_; }

  /// Coordinate of a node along an axis (cartesian, row-major, last axis fastest).
  double coordinate(std::size_t node, int axis) const;

  const Fourier& fourier() const;

  /// Radial face weights r_{j+1/2}^{d-1} (j = 0..n-1; the last face is r_max).
  std::span<const double> face_weight() const noexcept { return face_; }

  /// Surface area of the unit sphere S^{d-1}: 2, 2 pi, 4 pi.
  double sphere_area() const noexcept;

  bool same_shape(const Grid& other) const noexcept;

 private:
  friend std::shared_ptr<const Grid> make_grid(int d, std::size_t n, double extent, GridMode mode);
  Grid() = default;

  int d_ = 1;
  GridMode mode_ = GridMode::cartesian;
  std::size_t n_ = 0;
  double extent_ = 0.0;
  double h_ = 0.0;
  std::vector<double> radius_;
  std::vector<double> weight_;
  std::vector<double> axis_;
  std::vector<double> k_;
  std::vector<double> k2_;
  std::vector<double> face_;
  std::shared_ptr<const Fourier> fourier_;
};

/// Throws invalid-dimension (d outside 1..3) or resolution-too-small
/// (n < 8 or not a power of two, extent <= 0).
std::shared_ptr<const Grid> make_grid(int d, std::size_t n, double extent, GridMode mode);

using GridPtr = std::shared_ptr<const Grid>;

/// A complex wavefunction sampled on a grid.
struct Field {
  GridPtr grid;
  std::vector<cplx> values;
  double time = 0.0;

  Field() = default;
  explicit Field(GridPtr g) : grid(std::move(g)), values(grid ? grid->size() : 0) {}
  Field(GridPtr g, std::vector<cplx> v, double t = 0.0);

  std::size_t size() const noexcept { return values.size(); }
  bool finite() const noexcept;
  /// Throws invalid-field when any value is NaN or infinite.
  void require_finite(std::string_view where) const;
};

/// Fill a field from a function of the node position. For radial grids the
/// callable receives (r, 0, 0).
Field sample(GridPtr grid, const std::function<cplx(double, double, double)>& f);
/// Same for a radial profile f(|x|), valid in both modes.
Field sample_radial(GridPtr grid, const std::function<cplx(double)>& f);

double mass(const Field& f);
/// ||grad f||_2^2: spectral on cartesian grids, second-order conservative
/// differences with a Dirichlet face at r_max on radial grids.
double gradient_norm_sq(const Field& f);
/// Sum of w(x) |f(x)|^2 times the quadrature weight.
double weighted_norm(const Field& f, std::span<const double> w);
double weighted_norm(const Field& f, const std::function<double(double)>& radial_weight);
/// Integral of |f|^p.
double lp_integral(const Field& f, double p);
double linf_norm(const Field& f);

/// Mass carried by nodes in the outer 10% of the box (by max-norm for
/// cartesian grids), as a fraction of the total mass.
double boundary_shell_fraction(const Field& f);

/// Gradient components at every node. Cartesian: d arrays of spectral partial
/// derivatives (Nyquist mode dropped). Radial: one array holding d/dr by
/// central differences.
std::vector<std::vector<cplx>> gradient(const Field& f);

/// Discrete Laplacian consistent with gradient_norm_sq.
std::vector<cplx> laplacian(const Field& f);

/// |x|^{-sigma} at every node, with an optional floor max(|x|, eps).
std::vector<double> inverse_power(const Grid& g, double sigma, double eps = 0.0);

/// |x|^{-sigma} as used by the propagator and the energy. With eps = 0 the
/// innermost nodes of 1D cartesian and radial grids absorb the midpoint-rule
/// defect at the origin, -2^{d-1} h^{-sigma} zeta(sigma + 1 - d, 1/2), so the
/// quadrature of |x|^{-sigma} f is exact to O(h^{d+2-sigma}) for smooth f
/// instead of O(h^{d-sigma}). Other grids, and eps > 0, get point values.
std::vector<double> potential_table(const Grid& g, double sigma, double eps = 0.0);

/// Tridiagonal radial Laplacian for cell-centred radii: no flux through the
/// origin, homogeneous Dirichlet at r_max. Symmetric with respect to the
/// radial quadrature weights.
class RadialLaplacian {
 public:
  explicit RadialLaplacian(const Grid& g);

  void apply(std::span<const cplx> u, std::span<cplx> out) const;
  void apply(std::span<const double> u, std::span<double> out) const;

  /// Solves (a + b L) x = rhs in place (Thomas algorithm).
  void solve(cplx a, cplx b, std::span<cplx> rhs) const;
  void solve(double a, double b, std::span<double> rhs) const;

  std::span<const double> lower() const noexcept { return lower_; }
  std::span<const double> diag() const noexcept { return diag_; }
  std::span<const double> upper() const noexcept { return upper_; }

 private:
  std::vector<double> lower_, diag_, upper_;
  mutable std::vector<cplx> scratch_c_;
  mutable std::vector<double> scratch_r_;
};

}  // namespace nlsrep
