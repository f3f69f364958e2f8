#pragma once

// Exact inverses of shifted Laplacians on the box via real-to-real FFTs.
// Used as preconditioners inside the CG solvers and as the Poisson kernel of
// the pressure projection.

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "ctns/fields.hpp"

namespace ctns {

/// Boundary treatment along one axis.
///   NeumannCell   - cell-centred unknowns, zero flux at both walls (DCT-II)
///   DirichletCell - cell-centred unknowns, zero value at walls via ghosts (DST-II)
///   DirichletNode - unknowns at interior nodes, zero at both ends (DST-I)
enum class AxisBc { NeumannCell, DirichletCell, DirichletNode };

class SpectralSolver {
 public:
  /// cells: number of cells along each active axis (the DirichletNode axis
  /// holds cells-1 unknowns).
  SpectralSolver(int rank, std::array<int, 3> cells, std::array<AxisBc, 3> bcs,
                 std::array<double, 3> h);
  ~SpectralSolver();
  SpectralSolver(const SpectralSolver&) = delete;
  SpectralSolver& operator=(const SpectralSolver&) = delete;

  std::size_t size() const { return size_; }

  /// x = (alpha I - beta Lap)^+ rhs. Modes with a zero symbol (the constant
  /// mode of a pure Neumann Laplacian) are set to zero.
  void solve(std::span<const double> rhs, std::span<double> x, double alpha, double beta) const;

 private:
  int rank_;
  std::array<int, 3> m_{1, 1, 1};
  std::array<std::vector<double>, 3> eig_;
  std::size_t size_ = 0;
  double norm_ = 1.0;
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
};

/// Cached solvers for a grid: cell-centred Neumann / Dirichlet and one per
/// velocity component (DirichletNode along its own axis, DirichletCell across).
/// Thread-safe; solvers live for the program lifetime.
const SpectralSolver& cell_spectral_solver(const Grid& g, ScalarBc bc);
const SpectralSolver& face_spectral_solver(const Grid& g, int d);

}  // namespace ctns
