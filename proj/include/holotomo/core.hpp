#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <numbers>

namespace holotomo {

inline constexpr double kPi = std::numbers::pi_v<double>;

template <class Scalar>
using ComplexArray = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using RealArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using ComplexArrayXd = ComplexArray<double>;
using RealArrayXd = RealArray<double>;

template <class Scalar>
bool all_finite(const ComplexArray<Scalar>& a) {
  return a.real().isFinite().all() && a.imag().isFinite().all();
}

template <class Scalar>
bool all_finite(const RealArray<Scalar>& a) {
  return a.isFinite().all();
}

// <a, b> = sum_i conj(a_i) * b_i
template <class Scalar>
std::complex<Scalar> dot(const ComplexArray<Scalar>& a, const ComplexArray<Scalar>& b) {
  return (a.conjugate() * b).sum();
}

template <class Scalar>
Scalar squared_norm(const ComplexArray<Scalar>& a) {
  return a.abs2().sum();
}

template <class Scalar>
Scalar norm(const ComplexArray<Scalar>& a) {
  return std::sqrt(squared_norm(a));
}

}  // namespace holotomo
