#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ctns/error.hpp"
#include "ctns/fields.hpp"
#include "ctns/spectral.hpp"
#include "ctns/stencil.hpp"

using namespace ctns;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField random_scalar(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (double& v : f.values()) v = u(rng);
  return f;
}

VectorField random_noslip(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorField v(g);
  for (int d = 0; d < g.dim; ++d) {
    const auto e = g.face_extent(d);
    for (int i = 0; i < e[0]; ++i)
      for (int j = 0; j < e[1]; ++j)
        for (int k = 0; k < e[2]; ++k) {
          const int m = d == 0 ? i : d == 1 ? j : k;
          if (m > 0 && m < g.n[d]) v.at(d, i, j, k) = u(rng);
        }
  }
  return v;
}

}  // namespace

TEST(Grid, LayoutIsRowMajorXSlowest) {
  const Grid g = Grid::make(3, 4, 5, 1.0, 2.0, 3.0);
  EXPECT_EQ(g.cell(1, 2, 3), std::size_t((1 * 4 + 2) * 5 + 3));
  EXPECT_EQ(g.face(1, 1, 2, 3), std::size_t((1 * 5 + 2) * 5 + 3));
  EXPECT_EQ(g.face_count(2), std::size_t(3 * 4 * 6));
  EXPECT_DOUBLE_EQ(g.volume(), 6.0);
  EXPECT_DOUBLE_EQ(g.h[1], 0.5);
  const auto c = g.cell_center(0, 0, 0);
  EXPECT_DOUBLE_EQ(c[2], 0.3);
}

TEST(Grid, TwoDimensionalHasUnitDepth) {
  const Grid g = Grid::make(8, 4, 2.0, 1.0);
  EXPECT_EQ(g.dim, 2);
  EXPECT_EQ(g.n[2], 1);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.25 * 0.25);
  EXPECT_DOUBLE_EQ(g.min_spacing(), 0.25);
}

TEST(Gradient, ConstantHasZeroGradient) {
  const VectorField gr = gradient(ScalarField(Grid::make(7, 5), 3.0));
  for (int d = 0; d < 2; ++d)
    for (double v : gr.component(d)) EXPECT_EQ(v, 0.0);
}

TEST(Gradient, LinearIsExactOnInteriorFaces) {
  const Grid g = Grid::make(16, 8);
  ScalarField f(g);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 8; ++j) f(i, j) = g.cell_center(i, j)[0];
  const VectorField gr = gradient(f);
  for (int i = 0; i <= 16; ++i)
    for (int j = 0; j < 8; ++j)
      EXPECT_NEAR(gr.at(0, i, j), (i == 0 || i == 16) ? 0.0 : 1.0, 1e-13);
  for (double v : gr.component(1)) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(Divergence, OfGradientIsLaplacian) {
  for (const Grid& g : {Grid::make(9, 7), Grid::make(5, 4, 6, 1.0, 0.8, 1.2)}) {
    const ScalarField f = random_scalar(g, 4);
    const ScalarField a = divergence(gradient(f));
    const ScalarField b = laplacian(f);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-11);
  }
}

TEST(Divergence, UniformInteriorFieldCancelsInside) {
  const Grid g = Grid::make(6, 6);
  VectorField u(g);
  for (int i = 1; i < 6; ++i)
    for (int j = 0; j < 6; ++j) u.at(0, i, j) = 2.0;
  const ScalarField dv = divergence(u);
  for (int i = 1; i < 5; ++i)
    for (int j = 0; j < 6; ++j) EXPECT_EQ(dv(i, j), 0.0);
}

TEST(Laplacian, SelfAdjointAndGradSqConsistent) {
  const Grid g = Grid::make(11, 6, 4, 1.0, 1.0, 0.5);
  const ScalarField a = random_scalar(g, 1), b = random_scalar(g, 2);
  for (ScalarBc bc : {ScalarBc::Neumann, ScalarBc::Dirichlet}) {
    EXPECT_NEAR(inner(laplacian(a, bc), b), inner(a, laplacian(b, bc)), 1e-10);
    EXPECT_NEAR(-inner(laplacian(a, bc), a), grad_sq(a, bc), 1e-10 * grad_sq(a, bc));
  }
}

TEST(VectorLaplacian, SelfAdjointAndGradSqConsistent) {
  const Grid g = Grid::make(7, 9);
  const VectorField a = random_noslip(g, 3), b = random_noslip(g, 4);
  EXPECT_NEAR(inner(vector_laplacian(a), b), inner(a, vector_laplacian(b)), 1e-10);
  EXPECT_NEAR(-inner(vector_laplacian(a), a), vector_grad_sq(a), 1e-10 * vector_grad_sq(a));
  const VectorField l = vector_laplacian(a);
  for (int j = 0; j < 9; ++j) {
    EXPECT_EQ(l.at(0, 0, j), 0.0);
    EXPECT_EQ(l.at(0, 7, j), 0.0);
  }
}

TEST(Reductions, IntegralsAndNorms) {
  const Grid g = Grid::make(10, 10);
  EXPECT_NEAR(integrate(ScalarField(g, 1.0)), 1.0, 1e-15);
  const Grid g2 = Grid::make(4, 4, 2.0, 3.0);
  for (double p : {1.0, 2.0, 3.5})
    EXPECT_NEAR(lp_norm(ScalarField(g2, 0.7), p), 0.7 * std::pow(6.0, 1.0 / p), 1e-14);
  EXPECT_THROW(lp_norm(ScalarField(g2, 1.0), 0.5), DomainError);
  EXPECT_EQ(linf_norm(ScalarField(g2, -2.5)), 2.5);
}

TEST(Reductions, PairwiseSumIsReproducibleAndAccurate) {
  std::vector<double> v(100000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.1;
  const double a = pairwise_sum(v), b = pairwise_sum(v);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(a, 10000.0, 1e-9);
}

TEST(LaplacianSolve, ZeroShiftReturnsInput) {
  const ScalarField f = random_scalar(Grid::make(8, 8), 9);
  EXPECT_EQ(laplacian_solve(f, 0.0).values()[5], f[5]);
}

TEST(LaplacianSolve, CosineEigenfunction) {
  const double a = 0.1;
  double prev = 0.0;
  for (int m : {16, 32, 64}) {
    const Grid g = Grid::make(m, 4);
    ScalarField rhs(g), exact(g);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < 4; ++j) {
        const double c = std::cos(kPi * g.cell_center(i, j)[0]);
        exact(i, j) = c;
        rhs(i, j) = (1.0 + a * kPi * kPi) * c;
      }
    const ScalarField x = laplacian_solve(rhs, a, ScalarBc::Neumann, {1e-13, 500});
    double err = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::abs(x[i] - exact[i]));
    EXPECT_LT(err, 0.5 / (m * m));
    if (prev > 0.0) {
      EXPECT_NEAR(prev / err, 4.0, 0.2);
    }
    prev = err;
  }
}

TEST(LaplacianSolve, NeumannPreservesMean) {
  const Grid g = Grid::make(12, 10);
  const ScalarField f = random_scalar(g, 6);
  const ScalarField x = laplacian_solve(f, 0.3, ScalarBc::Neumann, {1e-12, 500});
  EXPECT_NEAR(integrate(x), integrate(f), 1e-13);
}

TEST(LaplacianSolve, ResidualAndStats) {
  const Grid g = Grid::make(9, 13);
  const ScalarField f = random_scalar(g, 8);
  SolveStats st;
  const ScalarField x = laplacian_solve(f, 0.05, ScalarBc::Dirichlet, {1e-12, 500}, &st);
  const ScalarField lx = laplacian(x, ScalarBc::Dirichlet);
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::abs(x[i] - 0.05 * lx[i] - f[i]));
  EXPECT_LT(r, 1e-10);
  EXPECT_LE(st.rel_residual, 1e-12);
}

TEST(Spectral, InvertsShiftedNeumannLaplacian) {
  const Grid g = Grid::make(10, 6, 4, 1.0, 0.7, 0.4);
  const SpectralSolver& s = cell_spectral_solver(g, ScalarBc::Neumann);
  const ScalarField f = random_scalar(g, 12);
  ScalarField x(g);
  s.solve(f.values(), x.values(), 1.0, 0.2);
  const ScalarField lx = laplacian(x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i] - 0.2 * lx[i], f[i], 1e-12);
}

TEST(Spectral, FaceSolverInvertsVectorHelmholtz) {
  const Grid g = Grid::make(8, 6);
  const VectorField w = random_noslip(g, 13);
  for (int d = 0; d < 2; ++d) {
    const SpectralSolver& s = face_spectral_solver(g, d);
    VectorField x(g);
    // Interior unknowns of component d are compacted; go through a full solve
    // on the face array via apply_vector_laplacian.
    std::vector<double> in(w.component(d).begin(), w.component(d).end());
    std::vector<double> packed, sol;
    const auto e = g.face_extent(d);
    for (int i = 0; i < e[0]; ++i)
      for (int j = 0; j < e[1]; ++j) {
        const int m = d == 0 ? i : j;
        if (m > 0 && m < g.n[d]) packed.push_back(w.at(d, i, j));
      }
    ASSERT_EQ(packed.size(), s.size());
    sol.resize(packed.size());
    s.solve(packed, sol, 1.0, 0.3);
    std::size_t t = 0;
    for (int i = 0; i < e[0]; ++i)
      for (int j = 0; j < e[1]; ++j) {
        const int m = d == 0 ? i : j;
        if (m > 0 && m < g.n[d]) x.at(d, i, j) = sol[t++];
      }
    std::vector<double> lap(in.size());
    apply_vector_laplacian(g, d, x.component(d), lap);
    for (int i = 0; i < e[0]; ++i)
      for (int j = 0; j < e[1]; ++j) {
        const int m = d == 0 ? i : j;
        if (m > 0 && m < g.n[d]) {
          const std::size_t f = g.face(d, i, j);
          EXPECT_NEAR(x.component(d)[f] - 0.3 * lap[f], in[f], 1e-12);
        }
      }
  }
}

TEST(Stencil, InteriorFacesVisitNeighbourPairs) {
  const Grid g = Grid::make(4, 3, 5, 1.0, 1.0, 1.0);
  for (int d = 0; d < 3; ++d) {
    std::size_t count = 0;
    for_each_interior_face_indexed(g, d, [&](std::size_t f, std::size_t l, std::size_t r, int m) {
      ++count;
      EXPECT_EQ(r - l, axis_stride(g.n, d));
      EXPECT_GE(m, 1);
      EXPECT_LT(m, g.n[d]);
      (void)f;
    });
    const std::size_t expected = g.cell_count() / g.n[d] * (g.n[d] - 1);
    EXPECT_EQ(count, expected);
    std::size_t count2 = 0;
    for_each_interior_face(g, d, [&](std::size_t f, std::size_t l, std::size_t r) {
      // Recover (i,j,k) of the face and check both cells straddle it.
      const auto e = g.face_extent(d);
      const int k = int(f % e[2]), j = int(f / e[2] % e[1]), i = int(f / e[2] / e[1]);
      std::array<int, 3> lo{i, j, k};
      lo[d] -= 1;
      EXPECT_EQ(l, g.cell(lo[0], lo[1], lo[2]));
      EXPECT_EQ(r, g.cell(i, j, k));
      ++count2;
    });
    EXPECT_EQ(count2, expected);
  }
}

TEST(Stencil, CellFacesAndWalls) {
  const Grid g = Grid::make(3, 4);
  for (int d = 0; d < 2; ++d) {
    for_each_cell_faces(g, d, [&](std::size_t c, std::size_t lo, std::size_t hi) {
      EXPECT_EQ(hi - lo, axis_stride(g.face_extent(d), d));
      (void)c;
    });
    int walls = 0;
    for_each_wall(g.n, d, [&](std::size_t) { ++walls; });
    EXPECT_EQ(walls, 2 * int(g.cell_count() / g.n[d]));
    int links = 0;
    for_each_link(g.n, d, [&](std::size_t lo, std::size_t hi) {
      EXPECT_EQ(hi - lo, axis_stride(g.n, d));
      ++links;
    });
    EXPECT_EQ(links, int(g.cell_count() / g.n[d]) * (g.n[d] - 1));
  }
}
