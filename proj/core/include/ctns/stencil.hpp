#pragma once

// Index iteration over cells and faces in contiguous runs. Each helper calls
// `fn` in storage order with plain offsets, so the loop bodies inline and
// vectorize. The layouts are those of fields.hpp.

#include <array>
#include <cstddef>

#include "ctns/fields.hpp"

namespace ctns {

/// Stride of axis a in an array with extents e.
inline std::size_t axis_stride(const std::array<int, 3>& e, int a) {
  return a == 0 ? std::size_t(e[1]) * e[2] : a == 1 ? std::size_t(e[2]) : 1;
}

/// fn(lo, hi) for every pair of neighbours along axis a of an array with
/// extents e; hi = lo + axis_stride(e, a).
template <class Fn>
void for_each_link(const std::array<int, 3>& e, int a, Fn&& fn) {
  const std::size_t s = axis_stride(e, a);
  const std::size_t outer = a == 0 ? 1 : a == 1 ? std::size_t(e[0]) : std::size_t(e[0]) * e[1];
  const std::size_t block = s * std::size_t(e[a]);
  const std::size_t run = s * std::size_t(e[a] - 1);
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * block;
    for (std::size_t t = 0; t < run; ++t) fn(base + t, base + t + s);
  }
}

/// fn(idx) for every entry on the low wall of axis a, then fn(idx) on the
/// high wall. With a single entry along a, both calls hit the same index.
template <class Fn>
void for_each_wall(const std::array<int, 3>& e, int a, Fn&& fn) {
  const std::size_t s = axis_stride(e, a);
  const std::size_t outer = a == 0 ? 1 : a == 1 ? std::size_t(e[0]) : std::size_t(e[0]) * e[1];
  const std::size_t block = s * std::size_t(e[a]);
  const std::size_t last = s * std::size_t(e[a] - 1);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t t = 0; t < s; ++t) fn(o * block + t);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t t = 0; t < s; ++t) fn(o * block + last + t);
}

/// fn(face, left_cell, right_cell) for every interior face of component d.
template <class Fn>
void for_each_interior_face(const Grid& g, int d, Fn&& fn) {
  const std::size_t s = axis_stride(g.n, d);
  const std::size_t outer = d == 0 ? 1 : d == 1 ? std::size_t(g.n[0]) : std::size_t(g.n[0]) * g.n[1];
  const std::size_t cblock = s * std::size_t(g.n[d]);
  const std::size_t fblock = s * std::size_t(g.n[d] + 1);
  const std::size_t run = s * std::size_t(g.n[d] - 1);
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t f0 = o * fblock + s, r0 = o * cblock + s;
    for (std::size_t t = 0; t < run; ++t) fn(f0 + t, r0 + t - s, r0 + t);
  }
}

/// As for_each_interior_face, with the index of the right cell along d as a
/// fourth argument.
template <class Fn>
void for_each_interior_face_indexed(const Grid& g, int d, Fn&& fn) {
  const std::size_t s = axis_stride(g.n, d);
  const std::size_t outer = d == 0 ? 1 : d == 1 ? std::size_t(g.n[0]) : std::size_t(g.n[0]) * g.n[1];
  const std::size_t cblock = s * std::size_t(g.n[d]);
  const std::size_t fblock = s * std::size_t(g.n[d] + 1);
  for (std::size_t o = 0; o < outer; ++o)
    for (int m = 1; m < g.n[d]; ++m) {
      const std::size_t f0 = o * fblock + std::size_t(m) * s, r0 = o * cblock + std::size_t(m) * s;
      for (std::size_t t = 0; t < s; ++t) fn(f0 + t, r0 + t - s, r0 + t, m);
    }
}

/// fn(cell, low_face, high_face) for every cell and the two faces of
/// component d bounding it.
template <class Fn>
void for_each_cell_faces(const Grid& g, int d, Fn&& fn) {
  const std::size_t s = axis_stride(g.n, d);
  const std::size_t outer = d == 0 ? 1 : d == 1 ? std::size_t(g.n[0]) : std::size_t(g.n[0]) * g.n[1];
  const std::size_t cblock = s * std::size_t(g.n[d]);
  const std::size_t fblock = s * std::size_t(g.n[d] + 1);
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t c0 = o * cblock, f0 = o * fblock;
    for (std::size_t t = 0; t < cblock; ++t) fn(c0 + t, f0 + t, f0 + t + s);
  }
}

}  // namespace ctns
