#include "ctns/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>

#include "ctns/error.hpp"

namespace ctns {

namespace {

// FFTW's planner is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(double* p) const { fftw_free(p); }
};

// Per-thread aligned scratch so concurrent simulations can share plans.
double* scratch(int which, std::size_t n) {
  thread_local std::unique_ptr<double, FftwFree> buf[2];
  thread_local std::size_t cap[2] = {0, 0};
  if (cap[which] < n) {
    buf[which].reset(fftw_alloc_real(n));
    cap[which] = n;
  }
  return buf[which].get();
}

fftw_r2r_kind forward_kind(AxisBc bc) {
  switch (bc) {
    case AxisBc::NeumannCell: return FFTW_REDFT10;
    case AxisBc::DirichletCell: return FFTW_RODFT10;
    case AxisBc::DirichletNode: return FFTW_RODFT00;
  }
  return FFTW_REDFT10;
}

fftw_r2r_kind backward_kind(AxisBc bc) {
  switch (bc) {
    case AxisBc::NeumannCell: return FFTW_REDFT01;
    case AxisBc::DirichletCell: return FFTW_RODFT01;
    case AxisBc::DirichletNode: return FFTW_RODFT00;
  }
  return FFTW_REDFT01;
}

}  // namespace

SpectralSolver::SpectralSolver(int rank, std::array<int, 3> cells, std::array<AxisBc, 3> bcs,
                               std::array<double, 3> h)
    : rank_(rank) {
  size_ = 1;
  for (int a = 0; a < rank; ++a) {
    const int n = cells[a];
    const int m = bcs[a] == AxisBc::DirichletNode ? n - 1 : n;
    m_[a] = m;
    size_ *= static_cast<std::size_t>(std::max(m, 0));
    norm_ *= 2.0 * n;
    eig_[a].resize(std::max(m, 0));
    const double inv_h2 = 1.0 / (h[a] * h[a]);
    for (int k = 0; k < m; ++k) {
      const int mode = bcs[a] == AxisBc::NeumannCell ? k : k + 1;
      const double s = std::sin(std::numbers::pi * mode / (2.0 * n));
      eig_[a][k] = 4.0 * s * s * inv_h2;
    }
  }
  if (size_ == 0) return;
  std::array<fftw_r2r_kind, 3> fk{}, bk{};
  std::array<int, 3> dims{};
  for (int a = 0; a < rank; ++a) {
    fk[a] = forward_kind(bcs[a]);
    bk[a] = backward_kind(bcs[a]);
    dims[a] = m_[a];
  }
  std::lock_guard<std::mutex> lock(planner_mutex());
  double* in = fftw_alloc_real(size_);
  double* out = fftw_alloc_real(size_);
  fwd_ = fftw_plan_r2r(rank, dims.data(), in, out, fk.data(), FFTW_MEASURE);
  bwd_ = fftw_plan_r2r(rank, dims.data(), out, in, bk.data(), FFTW_MEASURE);
  fftw_free(in);
  fftw_free(out);
  if (!fwd_ || !bwd_) throw SolverError("FFTW planning failed", 0.0, 0);
}

SpectralSolver::~SpectralSolver() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void SpectralSolver::solve(std::span<const double> rhs, std::span<double> x, double alpha,
                           double beta) const {
  if (size_ == 0) return;
  double* a = scratch(0, size_);
  double* b = scratch(1, size_);
  std::copy(rhs.begin(), rhs.end(), a);
  fftw_execute_r2r(static_cast<fftw_plan>(fwd_), a, b);
  const int m0 = m_[0], m1 = rank_ > 1 ? m_[1] : 1, m2 = rank_ > 2 ? m_[2] : 1;
  std::size_t idx = 0;
  for (int i = 0; i < m0; ++i)
    for (int j = 0; j < m1; ++j) {
      const double e01 = eig_[0][i] + (rank_ > 1 ? eig_[1][j] : 0.0);
      for (int k = 0; k < m2; ++k, ++idx) {
        const double lambda = e01 + (rank_ > 2 ? eig_[2][k] : 0.0);
        const double symbol = alpha + beta * lambda;
        b[idx] = symbol == 0.0 ? 0.0 : b[idx] / (symbol * norm_);
      }
    }
  fftw_execute_r2r(static_cast<fftw_plan>(bwd_), b, a);
  std::copy(a, a + size_, x.begin());
}

namespace {

using Key = std::tuple<int, int, int, int, double, double, double, int>;

const SpectralSolver& cached(const Key& key, int rank, std::array<int, 3> cells,
                             std::array<AxisBc, 3> bcs, std::array<double, 3> h) {
  static std::mutex mutex;
  static std::map<Key, std::unique_ptr<SpectralSolver>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<SpectralSolver>(rank, cells, bcs, h)).first;
  return *it->second;
}

}  // namespace

const SpectralSolver& cell_spectral_solver(const Grid& g, ScalarBc bc) {
  const AxisBc axis = bc == ScalarBc::Neumann ? AxisBc::NeumannCell : AxisBc::DirichletCell;
  const Key key{g.dim, g.n[0], g.n[1], g.n[2], g.h[0], g.h[1], g.h[2],
                bc == ScalarBc::Neumann ? -1 : -2};
  return cached(key, g.dim, g.n, {axis, axis, axis}, g.h);
}

const SpectralSolver& face_spectral_solver(const Grid& g, int d) {
  std::array<AxisBc, 3> bcs{AxisBc::DirichletCell, AxisBc::DirichletCell,
                            AxisBc::DirichletCell};
  bcs[d] = AxisBc::DirichletNode;
  const Key key{g.dim, g.n[0], g.n[1], g.n[2], g.h[0], g.h[1], g.h[2], d};
  return cached(key, g.dim, g.n, bcs, g.h);
}

}  // namespace ctns
