#pragma once

#include "holotomo/dft.hpp"
#include "holotomo/field.hpp"
#include "holotomo/parallel.hpp"

#include <cmath>
#include <vector>

namespace holotomo {

// Angular-spectrum transfer function for a signed propagation distance z,
// band-limited to the NA disc. Stored in the centered frequency layout of
// dft2_forward. |transfer| is 1 inside the band and 0 outside.
template <class Scalar>
struct PropagationKernel {
  GridSpec grid;
  double z = 0.0;
  ComplexArray<Scalar> transfer;
};

template <class Scalar>
PropagationKernel<Scalar> make_kernel(const GridSpec& grid, double z) {
  grid.validate();
  const double k = grid.wavenumber();
  const double f_cut2 = (grid.na / grid.wavelength) * (grid.na / grid.wavelength);
  ComplexArray<Scalar> t(grid.nx, grid.ny);
  for (int j = 0; j < grid.ny; ++j) {
    const double fy = grid.fy_at(j);
    for (int i = 0; i < grid.nx; ++i) {
      const double fx = grid.fx_at(i);
      const double f2 = fx * fx + fy * fy;
      const double kz2 = k * k - 4.0 * kPi * kPi * f2;
      if (f2 <= f_cut2 && kz2 >= 0.0) {
        const double phase = z * std::sqrt(kz2);
        t(i, j) = std::complex<Scalar>(Scalar(std::cos(phase)), Scalar(std::sin(phase)));
      } else {
        t(i, j) = std::complex<Scalar>(0, 0);
      }
    }
  }
  return {grid, z, std::move(t)};
}

template <class Scalar>
Field2D<Scalar> propagate(const Field2D<Scalar>& f, const PropagationKernel<Scalar>& kernel) {
  if (f.grid != kernel.grid) throw DataError("propagate: field and kernel grids differ");
  f.validate();
  return {f.grid, detail::ifft2_centered<Scalar>(kernel.transfer * detail::fft2_centered(f.values))};
}

template <class Scalar>
Field2D<Scalar> propagate(const Field2D<Scalar>& f, double z) {
  return propagate(f, make_kernel<Scalar>(f.grid, z));
}

// Projection onto the NA band (zero-distance propagation).
template <class Scalar>
Field2D<Scalar> bandlimit(const Field2D<Scalar>& f) {
  return propagate(f, 0.0);
}

// Precomputed per-slice kernels for one axial box; reused across the
// many forward/adjoint applications of an optimization run.
template <class Scalar>
struct BoxKernels {
  GridSpec grid;
  AxialBox box;
  std::vector<PropagationKernel<Scalar>> at_slice;
};

template <class Scalar>
BoxKernels<Scalar> make_box_kernels(const GridSpec& grid, const AxialBox& box) {
  grid.validate();
  box.validate(grid);
  BoxKernels<Scalar> ks{grid, box, {}};
  ks.at_slice.reserve(box.nz);
  for (int j = 0; j < box.nz; ++j)
    ks.at_slice.push_back(make_kernel<Scalar>(grid, slice_distance(grid, box, j)));
  return ks;
}

// Detector field of a multi-slice object: each slice is propagated its
// own distance to the detector plane and the fields are summed. Linear
// in the volume; slices are reduced in index order.
template <class Scalar>
Field2D<Scalar> forward_A(const FieldVolume<Scalar>& u, const BoxKernels<Scalar>& kernels) {
  u.validate();
  if (u.grid != kernels.grid || !(u.box == kernels.box))
    throw DataError("forward_A: volume does not match the kernel set");
  const int nz = u.nz();
  std::vector<ComplexArray<Scalar>> terms(nz);
  parallel_for(nz, [&](int j) {
    terms[j] = kernels.at_slice[j].transfer * detail::fft2_centered(u.slices[j]);
  });
  ComplexArray<Scalar> acc = std::move(terms[0]);
  for (int j = 1; j < nz; ++j) acc += terms[j];
  return {u.grid, detail::ifft2_centered<Scalar>(acc)};
}

template <class Scalar>
Field2D<Scalar> forward_A(const FieldVolume<Scalar>& u) {
  return forward_A(u, make_box_kernels<Scalar>(u.grid, u.box));
}

// Hermitian adjoint of forward_A: back-propagates the detector field to
// every slice of the box.
template <class Scalar>
FieldVolume<Scalar> adjoint_A(const Field2D<Scalar>& v, const BoxKernels<Scalar>& kernels) {
  v.validate();
  if (v.grid != kernels.grid) throw DataError("adjoint_A: field does not match the kernel set");
  const int nz = kernels.box.nz;
  FieldVolume<Scalar> u{kernels.grid, kernels.box, std::vector<ComplexArray<Scalar>>(nz)};
  const ComplexArray<Scalar> spectrum = detail::fft2_centered(v.values);
  parallel_for(nz, [&](int j) {
    u.slices[j] =
        detail::ifft2_centered<Scalar>(kernels.at_slice[j].transfer.conjugate() * spectrum);
  });
  return u;
}

template <class Scalar>
FieldVolume<Scalar> adjoint_A(const Field2D<Scalar>& v, const AxialBox& box) {
  return adjoint_A(v, make_box_kernels<Scalar>(v.grid, box));
}

}  // namespace holotomo
