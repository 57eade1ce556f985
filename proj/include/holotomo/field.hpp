#pragma once

#include "holotomo/core.hpp"
#include "holotomo/errors.hpp"
#include "holotomo/grid.hpp"

#include <utility>
#include <vector>

namespace holotomo {

// Complex 2D field sampled on a grid. values(i, j) is the sample at
// x = grid.x_at(i), y = grid.y_at(j).
template <class Scalar>
struct Field2D {
  GridSpec grid;
  ComplexArray<Scalar> values;

  void validate() const {
    grid.validate();
    if (values.rows() != grid.nx || values.cols() != grid.ny)
      throw DataError("field: value dimensions do not match the grid");
    if (!all_finite(values)) throw DataError("field: non-finite values");
  }
};

template <class Scalar>
Field2D<Scalar> zero_field(const GridSpec& grid) {
  grid.validate();
  return {grid, ComplexArray<Scalar>::Zero(grid.nx, grid.ny)};
}

// Stack of nz complex slices over an axial box. Slice 0 is the farthest
// slice from the detector (see slice_distance).
template <class Scalar>
struct FieldVolume {
  GridSpec grid;
  AxialBox box;
  std::vector<ComplexArray<Scalar>> slices;

  int nz() const { return box.nz; }
  double slice_z(int j) const { return slice_distance(grid, box, j); }

  void validate() const {
    grid.validate();
    box.validate(grid);
    if (static_cast<int>(slices.size()) != box.nz)
      throw DataError("volume: slice count does not match the box");
    for (const auto& s : slices) {
      if (s.rows() != grid.nx || s.cols() != grid.ny)
        throw DataError("volume: slice dimensions do not match the grid");
      if (!all_finite(s)) throw DataError("volume: non-finite values");
    }
  }
};

template <class Scalar>
FieldVolume<Scalar> zero_volume(const GridSpec& grid, const AxialBox& box) {
  grid.validate();
  box.validate(grid);
  FieldVolume<Scalar> u{grid, box, {}};
  u.slices.assign(box.nz, ComplexArray<Scalar>::Zero(grid.nx, grid.ny));
  return u;
}

// Recorded hologram: nonnegative intensity counts on a lateral grid.
template <class Scalar>
struct Hologram {
  GridSpec grid;
  RealArray<Scalar> intensity;

  void validate() const {
    grid.validate();
    if (intensity.rows() != grid.nx || intensity.cols() != grid.ny)
      throw DataError("hologram: dimensions do not match the grid");
    if (!all_finite(intensity)) throw DataError("hologram: non-finite intensity");
    if ((intensity < Scalar(0)).any()) throw DataError("hologram: negative intensity");
  }
};

template <class Scalar>
std::complex<Scalar> dot(const FieldVolume<Scalar>& a, const FieldVolume<Scalar>& b) {
  if (a.grid != b.grid || !(a.box == b.box)) throw DataError("volume dot: mismatched volumes");
  std::complex<Scalar> acc(0, 0);
  for (int j = 0; j < a.nz(); ++j) acc += dot(a.slices[j], b.slices[j]);
  return acc;
}

template <class Scalar>
Scalar squared_norm(const FieldVolume<Scalar>& u) {
  Scalar acc = 0;
  for (const auto& s : u.slices) acc += squared_norm(s);
  return acc;
}

template <class Scalar>
Scalar norm(const FieldVolume<Scalar>& u) {
  return std::sqrt(squared_norm(u));
}

template <class Scalar>
Scalar max_abs(const FieldVolume<Scalar>& u) {
  Scalar m = 0;
  for (const auto& s : u.slices) m = std::max(m, s.abs().maxCoeff());
  return m;
}

// Sum |value|^2 per slice, ordered like the slices themselves.
template <class Scalar>
std::vector<Scalar> volume_energy_profile(const FieldVolume<Scalar>& u) {
  u.validate();
  std::vector<Scalar> e(u.nz());
  for (int j = 0; j < u.nz(); ++j) e[j] = squared_norm(u.slices[j]);
  return e;
}

}  // namespace holotomo
