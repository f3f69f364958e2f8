#pragma once

// Structured box grid, cell-centred scalar fields, MAC-staggered vector
// fields and the discrete differential operators acting on them.
//
// Storage is row-major with x slowest: cell (i,j,k) lives at
// (i*ny + j)*nz + k. A face component d has n[d]+1 faces along axis d and
// uses the same ordering over its own extents. In 2D nz == 1 and there is no
// z component. Faces on the domain boundary are stored but always hold zero
// for velocities (no-slip normal component) and for gradients of scalars
// (homogeneous Neumann).

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace ctns {

struct Grid {
  int dim = 2;
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> length{1.0, 1.0, 1.0};
  std::array<double, 3> h{1.0, 1.0, 1.0};

  static Grid make(int nx, int ny, double lx = 1.0, double ly = 1.0);
  static Grid make(int nx, int ny, int nz, double lx, double ly, double lz);

  std::size_t cell_count() const { return std::size_t(n[0]) * n[1] * n[2]; }
  std::array<int, 3> face_extent(int d) const {
    auto e = n;
    e[d] += 1;
    return e;
  }
  std::size_t face_count(int d) const {
    const auto e = face_extent(d);
    return std::size_t(e[0]) * e[1] * e[2];
  }

  std::size_t cell(int i, int j, int k = 0) const {
    return (std::size_t(i) * n[1] + j) * n[2] + k;
  }
  std::size_t face(int d, int i, int j, int k = 0) const {
    const auto e = face_extent(d);
    return (std::size_t(i) * e[1] + j) * e[2] + k;
  }

  /// Volume of one cell (area in 2D). Also the weight of one face in face
  /// inner products.
  double cell_volume() const;
  /// |Omega|.
  double volume() const;
  double min_spacing() const;

  std::array<double, 3> cell_center(int i, int j, int k = 0) const;
  /// Centre of face (i,j,k) of component d; coordinate d is i_d * h_d.
  std::array<double, 3> face_center(int d, int i, int j, int k = 0) const;

  bool operator==(const Grid&) const = default;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double value = 0.0);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double& operator[](std::size_t idx) { return values_[idx]; }
  double operator[](std::size_t idx) const { return values_[idx]; }
  double& operator()(int i, int j, int k = 0) { return values_[grid_.cell(i, j, k)]; }
  double operator()(int i, int j, int k = 0) const { return values_[grid_.cell(i, j, k)]; }

  double min() const;
  double max() const;
  bool all_finite() const;

  bool operator==(const ScalarField&) const = default;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Face-staggered vector data. Used both for velocities and for gradients
/// of scalar fields.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& grid);

  const Grid& grid() const { return grid_; }

  std::span<double> component(int d) { return comp_[d]; }
  std::span<const double> component(int d) const { return comp_[d]; }

  double& at(int d, int i, int j, int k = 0) { return comp_[d][grid_.face(d, i, j, k)]; }
  double at(int d, int i, int j, int k = 0) const { return comp_[d][grid_.face(d, i, j, k)]; }

  /// Set once the field has been projected; cleared by any mutation the
  /// caller performs through component().
  bool solenoidal = false;

  bool all_finite() const;

  bool operator==(const VectorField&) const = default;

 private:
  Grid grid_;
  std::array<std::vector<double>, 3> comp_;
};

// ---- reductions -----------------------------------------------------------

/// Sum with a fixed pairwise tree; bit-reproducible for a given length.
double pairwise_sum(std::span<const double> values);
double dot(std::span<const double> a, std::span<const double> b);

/// Midpoint-rule integral over the box.
double integrate(const ScalarField& f);
/// (sum |f_i|^p vol)^(1/p); throws DomainError for p < 1.
double lp_norm(const ScalarField& f, double p);
double linf_norm(const ScalarField& f);
double linf_norm(const VectorField& u);

/// Volume-weighted inner products.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
/// 1/2 |u|^2 integrated over faces.
double kinetic_energy(const VectorField& u);

// ---- operators -------------------------------------------------------------

/// Centred differences on interior faces; zero on boundary faces.
VectorField gradient(const ScalarField& f);
/// Cell-centred flux differences.
ScalarField divergence(const VectorField& u);
double max_abs_divergence(const VectorField& u);

enum class ScalarBc { Neumann, Dirichlet };

/// Cell-centred 2*dim+1 point Laplacian. Neumann: zero flux through walls.
/// Dirichlet: homogeneous value on the wall via reflected ghost cells.
ScalarField laplacian(const ScalarField& f, ScalarBc bc = ScalarBc::Neumann);
void apply_laplacian(const Grid& g, ScalarBc bc, std::span<const double> in,
                     std::span<double> out);

/// Componentwise Laplacian of a no-slip face field. Boundary-normal faces are
/// fixed at zero; tangential walls use reflected ghosts (zero wall value).
VectorField vector_laplacian(const VectorField& u);
void apply_vector_laplacian(const Grid& g, int d, std::span<const double> in,
                            std::span<double> out);

/// int |grad f|^2 = <-Lap f, f> for the given boundary condition, assembled
/// as a sum of squared link differences.
double grad_sq(const ScalarField& f, ScalarBc bc = ScalarBc::Neumann);
/// int |grad u|^2 = <-Lap u, u> for a no-slip face field.
double vector_grad_sq(const VectorField& u);

// ---- implicit diffusion ------------------------------------------------------

struct SolveOptions {
  double rel_tol = 1e-10;
  int max_iters = 500;
};

struct SolveStats {
  int iterations = 0;
  double rel_residual = 0.0;
};

/// Solves (I - a Lap_h) f = rhs by preconditioned conjugate gradients.
/// a == 0 returns rhs. For Neumann the mean of the result equals the mean of
/// rhs. Throws SolverError if the tolerance is not met.
ScalarField laplacian_solve(const ScalarField& rhs, double a, ScalarBc bc = ScalarBc::Neumann,
                            const SolveOptions& opts = {}, SolveStats* stats = nullptr);

}  // namespace ctns
