#pragma once

#include "holotomo/core.hpp"
#include "holotomo/errors.hpp"
#include "holotomo/field.hpp"

#include <unsupported/Eigen/FFT>

namespace holotomo {

namespace detail {

template <class Scalar>
Eigen::FFT<Scalar>& fft_engine() {
  thread_local Eigen::FFT<Scalar> engine(typename Eigen::FFT<Scalar>::impl_type(),
                                         Eigen::FFT<Scalar>::Unscaled);
  return engine;
}

// Unnormalized separable 2D transform, index 0 at the array origin.
template <class Scalar>
ComplexArray<Scalar> raw_fft2(const ComplexArray<Scalar>& a, bool inverse) {
  const Eigen::Index nx = a.rows();
  const Eigen::Index ny = a.cols();
  ComplexArray<Scalar> out(nx, ny);
  auto& engine = fft_engine<Scalar>();
  for (Eigen::Index j = 0; j < ny; ++j) {
    if (inverse)
      engine.inv(out.col(j).data(), a.col(j).data(), nx);
    else
      engine.fwd(out.col(j).data(), a.col(j).data(), nx);
  }
  Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1> row_in(ny), row_out(ny);
  for (Eigen::Index i = 0; i < nx; ++i) {
    row_in = out.row(i).transpose();
    if (inverse)
      engine.inv(row_out.data(), row_in.data(), ny);
    else
      engine.fwd(row_out.data(), row_in.data(), ny);
    out.row(i) = row_out.transpose();
  }
  return out;
}

template <class Scalar>
void require_even_dims(const ComplexArray<Scalar>& a) {
  if (a.rows() < 2 || a.cols() < 2 || a.rows() % 2 != 0 || a.cols() % 2 != 0)
    throw ConfigError("dft: array dimensions must be even and >= 2");
}

// Unitary centered forward transform without the finite-value check.
template <class Scalar>
ComplexArray<Scalar> fft2_centered(const ComplexArray<Scalar>& a);
template <class Scalar>
ComplexArray<Scalar> ifft2_centered(const ComplexArray<Scalar>& a);

}  // namespace detail

// Swaps quadrants so the zero bin moves between index 0 and index
// (nx/2, ny/2). An involution for the even sizes required here.
template <class Scalar>
ComplexArray<Scalar> fftshift2(const ComplexArray<Scalar>& a) {
  detail::require_even_dims(a);
  const Eigen::Index hx = a.rows() / 2;
  const Eigen::Index hy = a.cols() / 2;
  ComplexArray<Scalar> out(a.rows(), a.cols());
  out.block(0, 0, hx, hy) = a.block(hx, hy, hx, hy);
  out.block(hx, hy, hx, hy) = a.block(0, 0, hx, hy);
  out.block(0, hy, hx, hy) = a.block(hx, 0, hx, hy);
  out.block(hx, 0, hx, hy) = a.block(0, hy, hx, hy);
  return out;
}

namespace detail {

template <class Scalar>
ComplexArray<Scalar> fft2_centered(const ComplexArray<Scalar>& a) {
  const Scalar scale = Scalar(1) / std::sqrt(Scalar(a.rows() * a.cols()));
  return fftshift2<Scalar>(raw_fft2(a, false)) * scale;
}

template <class Scalar>
ComplexArray<Scalar> ifft2_centered(const ComplexArray<Scalar>& a) {
  const Scalar scale = Scalar(1) / std::sqrt(Scalar(a.rows() * a.cols()));
  return raw_fft2<Scalar>(fftshift2(a), true) * scale;
}

}  // namespace detail

// Unitary 2D DFT with the zero-frequency bin at (nx/2, ny/2); bin (i, j)
// holds frequency ((i - nx/2)/(nx dx), (j - ny/2)/(ny dy)).
template <class Scalar>
ComplexArray<Scalar> dft2_forward(const ComplexArray<Scalar>& a) {
  detail::require_even_dims(a);
  if (!all_finite(a)) throw DataError("dft2_forward: non-finite input");
  return detail::fft2_centered(a);
}

template <class Scalar>
ComplexArray<Scalar> dft2_inverse(const ComplexArray<Scalar>& a) {
  detail::require_even_dims(a);
  if (!all_finite(a)) throw DataError("dft2_inverse: non-finite input");
  return detail::ifft2_centered(a);
}

template <class Scalar>
Field2D<Scalar> dft2_forward(const Field2D<Scalar>& f) {
  return {f.grid, dft2_forward(f.values)};
}

template <class Scalar>
Field2D<Scalar> dft2_inverse(const Field2D<Scalar>& f) {
  return {f.grid, dft2_inverse(f.values)};
}

}  // namespace holotomo
