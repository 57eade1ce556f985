#pragma once

#include "holotomo/dft.hpp"
#include "holotomo/field.hpp"

#include <cmath>

namespace holotomo {

namespace detail {

template <class Scalar>
Scalar wrap_to_pi(Scalar t) {
  return t - Scalar(2.0 * kPi) * std::round(t / Scalar(2.0 * kPi));
}

}  // namespace detail

// Least-squares phase unwrapping: a Poisson solve on the wrapped phase
// differences with Neumann boundaries, realized by even mirror extension
// and an FFT-diagonalized 5-point Laplacian. The result is anchored to
// the input phase at the strongest-amplitude pixel, so for a consistent
// (residue-free) phase map the output rewraps to the input.
template <class Scalar>
RealArray<Scalar> unwrap_phase(const Field2D<Scalar>& v) {
  v.validate();
  const int nx = v.grid.nx;
  const int ny = v.grid.ny;
  Eigen::Index imax = 0, jmax = 0;
  if (!(v.values.abs().maxCoeff(&imax, &jmax) > Scalar(0)))
    throw DataError("unwrap: all-zero field");

  RealArray<Scalar> psi(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) psi(i, j) = std::arg(v.values(i, j));

  // Wrapped forward differences, zero on the far boundary.
  RealArray<Scalar> dx = RealArray<Scalar>::Zero(nx, ny);
  RealArray<Scalar> dy = RealArray<Scalar>::Zero(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i + 1 < nx; ++i) dx(i, j) = detail::wrap_to_pi(psi(i + 1, j) - psi(i, j));
  for (int j = 0; j + 1 < ny; ++j)
    for (int i = 0; i < nx; ++i) dy(i, j) = detail::wrap_to_pi(psi(i, j + 1) - psi(i, j));

  RealArray<Scalar> rho(nx, ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      Scalar r = dx(i, j) + dy(i, j);
      if (i > 0) r -= dx(i - 1, j);
      if (j > 0) r -= dy(i, j - 1);
      rho(i, j) = r;
    }
  }

  // Even mirror extension turns the Neumann problem into a periodic one.
  const int mx = 2 * nx, my = 2 * ny;
  ComplexArray<Scalar> ext(mx, my);
  for (int j = 0; j < my; ++j) {
    const int js = j < ny ? j : my - 1 - j;
    for (int i = 0; i < mx; ++i) {
      const int is = i < nx ? i : mx - 1 - i;
      ext(i, j) = std::complex<Scalar>(rho(is, js), 0);
    }
  }

  ComplexArray<Scalar> spec = detail::raw_fft2(ext, false);
  for (int j = 0; j < my; ++j) {
    const Scalar cj = std::cos(Scalar(2.0 * kPi) * Scalar(j) / Scalar(my));
    for (int i = 0; i < mx; ++i) {
      if (i == 0 && j == 0) {
        spec(0, 0) = std::complex<Scalar>(0, 0);
        continue;
      }
      const Scalar ci = std::cos(Scalar(2.0 * kPi) * Scalar(i) / Scalar(mx));
      spec(i, j) /= Scalar(2) * ci + Scalar(2) * cj - Scalar(4);
    }
  }
  const ComplexArray<Scalar> sol = detail::raw_fft2(spec, true);

  RealArray<Scalar> phi(nx, ny);
  const Scalar scale = Scalar(1) / Scalar(static_cast<double>(mx) * my);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) phi(i, j) = sol(i, j).real() * scale;

  phi += psi(imax, jmax) - phi(imax, jmax);
  return phi;
}

}  // namespace holotomo
