#pragma once

#include "holotomo/field.hpp"

#include <cmath>
#include <vector>

namespace holotomo {

// Smoothing constant and the physical spacings used by the volume
// finite differences (lateral and axial pitches generally differ).
template <class Scalar>
struct TvConfig {
  Scalar epsilon = Scalar(1e-3);
  double sx = 1.0;
  double sy = 1.0;
  double sz = 1.0;

  void validate() const {
    if (!(epsilon > Scalar(0))) throw ConfigError("tv: epsilon must be positive");
    if (!(sx > 0.0) || !(sy > 0.0) || !(sz > 0.0))
      throw ConfigError("tv: spacings must be positive");
  }
};

template <class Scalar>
TvConfig<Scalar> tv_config_for(const GridSpec& grid, Scalar epsilon) {
  TvConfig<Scalar> cfg{epsilon, grid.dx, grid.dy, grid.dz};
  cfg.validate();
  return cfg;
}

// Per-axis forward differences of a volume, divided by the spacing, with
// replicate boundaries (the last difference along each axis is zero).
template <class Scalar>
struct VolumeGradient {
  std::vector<ComplexArray<Scalar>> x, y, z;
};

template <class Scalar>
VolumeGradient<Scalar> tv_forward_diff(const FieldVolume<Scalar>& u, const TvConfig<Scalar>& cfg) {
  const int nx = u.grid.nx, ny = u.grid.ny, nz = u.nz();
  const Scalar ix = Scalar(1.0 / cfg.sx), iy = Scalar(1.0 / cfg.sy), iz = Scalar(1.0 / cfg.sz);
  VolumeGradient<Scalar> g;
  g.x.assign(nz, ComplexArray<Scalar>::Zero(nx, ny));
  g.y.assign(nz, ComplexArray<Scalar>::Zero(nx, ny));
  g.z.assign(nz, ComplexArray<Scalar>::Zero(nx, ny));
  for (int j = 0; j < nz; ++j) {
    const auto& s = u.slices[j];
    g.x[j].topRows(nx - 1) = (s.bottomRows(nx - 1) - s.topRows(nx - 1)) * ix;
    g.y[j].leftCols(ny - 1) = (s.rightCols(ny - 1) - s.leftCols(ny - 1)) * iy;
    if (j < nz - 1) g.z[j] = (u.slices[j + 1] - s) * iz;
  }
  return g;
}

// Discrete divergence chosen as the exact negative transpose of
// tv_forward_diff, so <Gu, p> = -<u, Dp> holds to rounding.
template <class Scalar>
std::vector<ComplexArray<Scalar>> tv_divergence(const VolumeGradient<Scalar>& g,
                                                const TvConfig<Scalar>& cfg) {
  const int nz = static_cast<int>(g.x.size());
  const int nx = static_cast<int>(g.x[0].rows());
  const int ny = static_cast<int>(g.x[0].cols());
  const Scalar ix = Scalar(1.0 / cfg.sx), iy = Scalar(1.0 / cfg.sy), iz = Scalar(1.0 / cfg.sz);
  std::vector<ComplexArray<Scalar>> div(nz, ComplexArray<Scalar>::Zero(nx, ny));
  for (int j = 0; j < nz; ++j) {
    auto& d = div[j];
    const auto& px = g.x[j];
    const auto& py = g.y[j];
    d.topRows(nx - 1) += px.topRows(nx - 1) * ix;
    d.bottomRows(nx - 1) -= px.topRows(nx - 1) * ix;
    d.leftCols(ny - 1) += py.leftCols(ny - 1) * iy;
    d.rightCols(ny - 1) -= py.leftCols(ny - 1) * iy;
    if (j < nz - 1) d += g.z[j] * iz;
    if (j > 0) d -= g.z[j - 1] * iz;
  }
  return div;
}

// Sum over voxels of sqrt(|grad_x|^2 + |grad_y|^2 + |grad_z|^2); zero for
// constant volumes and positively homogeneous of degree one.
template <class Scalar>
Scalar tv_value(const FieldVolume<Scalar>& u, const TvConfig<Scalar>& cfg) {
  u.validate();
  const auto g = tv_forward_diff(u, cfg);
  Scalar acc = 0;
  for (int j = 0; j < u.nz(); ++j)
    acc += (g.x[j].abs2() + g.y[j].abs2() + g.z[j].abs2()).sqrt().sum();
  return acc;
}

// Smoothed variant with epsilon^2 inside the square root; this is the
// functional the gradient below differentiates.
template <class Scalar>
Scalar tv_value_smoothed(const FieldVolume<Scalar>& u, const TvConfig<Scalar>& cfg) {
  u.validate();
  cfg.validate();
  const auto g = tv_forward_diff(u, cfg);
  const Scalar e2 = cfg.epsilon * cfg.epsilon;
  Scalar acc = 0;
  for (int j = 0; j < u.nz(); ++j)
    acc += (g.x[j].abs2() + g.y[j].abs2() + g.z[j].abs2() + e2).sqrt().sum();
  return acc;
}

// Gradient of the smoothed functional with respect to the conjugate
// field: half the negative divergence of the epsilon-normalized forward
// differences. Real input yields a real gradient.
template <class Scalar>
FieldVolume<Scalar> tv_gradient(const FieldVolume<Scalar>& u, const TvConfig<Scalar>& cfg) {
  u.validate();
  cfg.validate();
  auto g = tv_forward_diff(u, cfg);
  const Scalar e2 = cfg.epsilon * cfg.epsilon;
  for (int j = 0; j < u.nz(); ++j) {
    const RealArray<Scalar> s = (g.x[j].abs2() + g.y[j].abs2() + g.z[j].abs2() + e2).sqrt();
    g.x[j] /= s;
    g.y[j] /= s;
    g.z[j] /= s;
  }
  auto div = tv_divergence(g, cfg);
  FieldVolume<Scalar> out{u.grid, u.box, std::move(div)};
  for (auto& s : out.slices) s *= Scalar(-0.5);
  return out;
}

}  // namespace holotomo
