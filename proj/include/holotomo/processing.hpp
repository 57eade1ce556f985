#pragma once

#include "holotomo/field.hpp"
#include "holotomo/parallel.hpp"
#include "holotomo/propagation.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace holotomo {

// Off-axis carrier pick: the frequency-plane location of the cross-term
// lobe conjugate to the reference tilt, in cycles per micrometer. The
// carrier is realized on the nearest DFT bin. mask_radius <= 0 selects
// the default of half the realized carrier magnitude.
struct CarrierSpec {
  double fx = 0.0;
  double fy = 0.0;
  double mask_radius = 0.0;
};

// Gaussian amplitude window; radius is the 1/e^2 intensity radius in
// micrometers. A non-finite radius disables the window exactly.
struct GaussianWindowSpec {
  double radius = std::numeric_limits<double>::infinity();
};

inline int default_window_radius_px(const GridSpec& grid) {
  return static_cast<int>(std::lround(65.0 * grid.nx / 280.0));
}

inline double default_gaussian_radius(const GridSpec& grid) {
  return 0.2 * std::min(grid.nx * grid.dx, grid.ny * grid.dy);
}

namespace detail {

struct CarrierBins {
  int kx = 0;
  int ky = 0;
  double fx = 0.0;  // realized carrier, cycles/um
  double fy = 0.0;
  double magnitude = 0.0;
  double mask_radius = 0.0;
};

inline CarrierBins resolve_carrier(const GridSpec& grid, const CarrierSpec& c) {
  CarrierBins b;
  b.kx = static_cast<int>(std::lround(c.fx * grid.nx * grid.dx));
  b.ky = static_cast<int>(std::lround(c.fy * grid.ny * grid.dy));
  b.fx = b.kx * grid.fx_step();
  b.fy = b.ky * grid.fy_step();
  b.magnitude = std::hypot(b.fx, b.fy);
  b.mask_radius = c.mask_radius > 0.0 ? c.mask_radius : 0.5 * b.magnitude;
  return b;
}

// Circular shift moving bin (i, j) to ((i + sx) mod nx, (j + sy) mod ny).
template <class Scalar>
ComplexArray<Scalar> roll2(const ComplexArray<Scalar>& a, int sx, int sy) {
  const int nx = static_cast<int>(a.rows());
  const int ny = static_cast<int>(a.cols());
  sx = ((sx % nx) + nx) % nx;
  sy = ((sy % ny) + ny) % ny;
  ComplexArray<Scalar> out(nx, ny);
  for (int j = 0; j < ny; ++j) {
    const int jo = (j + sy) % ny;
    for (int i = 0; i < nx; ++i) out((i + sx) % nx, jo) = a(i, j);
  }
  return out;
}

}  // namespace detail

// Fourier-transform-method demodulation: isolates the cross-term lobe at
// minus the carrier with a hard circular mask, shifts it to baseband and
// inverse transforms. The output is the object field scaled by the
// (assumed flat) reference amplitude.
template <class Scalar>
Field2D<Scalar> demodulate_ftm(const Hologram<Scalar>& h, const CarrierSpec& carrier) {
  h.validate();
  const GridSpec& grid = h.grid;
  const auto bins = detail::resolve_carrier(grid, carrier);
  if (!(bins.mask_radius < bins.magnitude))
    throw DataError("insufficient carrier separation: mask reaches the zero-order term");
  ComplexArray<Scalar> spectrum =
      detail::fft2_centered<Scalar>(h.intensity.template cast<std::complex<Scalar>>());
  const double cx = -bins.fx;
  const double cy = -bins.fy;
  const double r2 = bins.mask_radius * bins.mask_radius;
  for (int j = 0; j < grid.ny; ++j) {
    const double dfy = grid.fy_at(j) - cy;
    for (int i = 0; i < grid.nx; ++i) {
      const double dfx = grid.fx_at(i) - cx;
      if (dfx * dfx + dfy * dfy > r2) spectrum(i, j) = std::complex<Scalar>(0, 0);
    }
  }
  return {grid, detail::ifft2_centered<Scalar>(detail::roll2(spectrum, bins.kx, bins.ky))};
}

// Removes the mean and applies the Gaussian window, suppressing the
// residual background far from the object.
template <class Scalar>
Field2D<Scalar> subtract_background(const Field2D<Scalar>& v, const GaussianWindowSpec& window) {
  v.validate();
  const std::complex<Scalar> mean = v.values.mean();
  ComplexArray<Scalar> out = v.values - mean;
  if (std::isfinite(window.radius)) {
    if (!(window.radius > 0.0)) throw ConfigError("window: radius must be positive");
    const double inv_w2 = 1.0 / (window.radius * window.radius);
    for (int j = 0; j < v.grid.ny; ++j) {
      const double y = v.grid.y_at(j);
      for (int i = 0; i < v.grid.nx; ++i) {
        const double x = v.grid.x_at(i);
        out(i, j) *= Scalar(std::exp(-(x * x + y * y) * inv_w2));
      }
    }
  }
  return {v.grid, std::move(out)};
}

namespace detail {

// Population standard deviation of |v| over the central disc.
template <class Scalar>
Scalar window_stddev(const ComplexArray<Scalar>& values, const GridSpec& grid, int radius_px) {
  const int cx = grid.nx / 2;
  const int cy = grid.ny / 2;
  const long r2 = static_cast<long>(radius_px) * radius_px;
  Scalar sum = 0;
  long count = 0;
  for (int j = 0; j < grid.ny; ++j) {
    const long dj = j - cy;
    for (int i = 0; i < grid.nx; ++i) {
      const long di = i - cx;
      if (di * di + dj * dj <= r2) {
        sum += std::abs(values(i, j));
        ++count;
      }
    }
  }
  const Scalar mean = sum / Scalar(count);
  Scalar var = 0;
  for (int j = 0; j < grid.ny; ++j) {
    const long dj = j - cy;
    for (int i = 0; i < grid.nx; ++i) {
      const long di = i - cx;
      if (di * di + dj * dj <= r2) {
        const Scalar d = std::abs(values(i, j)) - mean;
        var += d * d;
      }
    }
  }
  return std::sqrt(var / Scalar(count));
}

template <class Scalar>
void check_window_radius(const GridSpec& grid, int radius_px) {
  if (radius_px <= 0) throw ConfigError("contrast: window radius must be positive");
  if (radius_px > grid.nx / 2 || radius_px > grid.ny / 2)
    throw ConfigError("contrast: window radius does not fit in the grid");
}

}  // namespace detail

// Amplitude contrast: square root of the standard deviation of |v| in a
// central circular window. Minimal at the focus plane of a phase object.
template <class Scalar>
Scalar amplitude_contrast(const Field2D<Scalar>& v, int radius_px) {
  v.validate();
  detail::check_window_radius<Scalar>(v.grid, radius_px);
  return std::sqrt(detail::window_stddev(v.values, v.grid, radius_px));
}

// Axial sweep of the amplitude contrast of the back-propagated field.
template <class Scalar>
struct FocusScan {
  std::vector<double> z_list;
  std::vector<Scalar> sigma_list;     // standard deviation per z
  std::vector<Scalar> contrast_list;  // sqrt of sigma per z
  double z_focus = 0.0;
  int window_radius_px = 0;
};

template <class Scalar>
FocusScan<Scalar> focus_scan(const Field2D<Scalar>& v, double z_min, double z_max, double z_step,
                             int radius_px) {
  v.validate();
  detail::check_window_radius<Scalar>(v.grid, radius_px);
  if (!(z_min >= 0.0) || !(z_step > 0.0) || !(z_min < z_max))
    throw ConfigError("focus scan: need 0 <= z_min < z_max and z_step > 0");
  const int n = static_cast<int>(std::floor((z_max - z_min) / z_step + 1e-9)) + 1;
  if (n < 1) throw ConfigError("focus scan: empty ladder");

  FocusScan<Scalar> scan;
  scan.window_radius_px = radius_px;
  scan.z_list.resize(n);
  scan.sigma_list.resize(n);
  scan.contrast_list.resize(n);
  for (int k = 0; k < n; ++k) scan.z_list[k] = z_min + k * z_step;

  const ComplexArray<Scalar> spectrum = detail::fft2_centered(v.values);
  const GridSpec grid = v.grid;
  parallel_for(n, [&](int k) {
    const auto kernel = make_kernel<Scalar>(grid, -scan.z_list[k]);
    const ComplexArray<Scalar> bp = detail::ifft2_centered<Scalar>(kernel.transfer * spectrum);
    scan.sigma_list[k] = detail::window_stddev(bp, grid, radius_px);
    scan.contrast_list[k] = std::sqrt(scan.sigma_list[k]);
  });

  int best = 0;
  for (int k = 1; k < n; ++k)
    if (scan.contrast_list[k] < scan.contrast_list[best]) best = k;  // first minimum wins ties
  scan.z_focus = scan.z_list[best];
  return scan;
}

// Per-slice weights, max-normalized to 1.
template <class Scalar>
struct WeightVector {
  Eigen::Array<Scalar, Eigen::Dynamic, 1> weights;

  void validate() const {
    if (weights.size() < 1) throw ConfigError("weights: empty");
    if (!((weights > Scalar(0)).all()) || !((weights <= Scalar(1)).all()))
      throw ConfigError("weights: entries must lie in (0, 1]");
    if (weights.maxCoeff() != Scalar(1)) throw ConfigError("weights: maximum must equal 1");
  }
};

// Inverse contrasts normalized so the largest weight is exactly 1.
template <class Scalar>
WeightVector<Scalar> normalize_inverse_contrast(const std::vector<Scalar>& contrasts) {
  if (contrasts.empty()) throw ConfigError("weights: no contrasts given");
  Scalar cmin = contrasts[0];
  for (const Scalar c : contrasts) {
    if (!(c > Scalar(0))) throw NumericalError("degenerate contrast; weights undefined");
    cmin = std::min(cmin, c);
  }
  WeightVector<Scalar> w;
  w.weights.resize(static_cast<Eigen::Index>(contrasts.size()));
  for (size_t j = 0; j < contrasts.size(); ++j)
    w.weights[static_cast<Eigen::Index>(j)] = cmin / contrasts[j];
  return w;
}

// Inverse amplitude-contrast weights for the slices of an axial box,
// computed from the back-propagated detector field. Invariant under
// global rescaling of v.
template <class Scalar>
WeightVector<Scalar> compute_weights(const Field2D<Scalar>& v, const AxialBox& box, int radius_px) {
  v.validate();
  box.validate(v.grid);
  detail::check_window_radius<Scalar>(v.grid, radius_px);
  const ComplexArray<Scalar> spectrum = detail::fft2_centered(v.values);
  const GridSpec grid = v.grid;
  std::vector<Scalar> contrasts(box.nz);
  parallel_for(box.nz, [&](int j) {
    const auto kernel = make_kernel<Scalar>(grid, -slice_distance(grid, box, j));
    const ComplexArray<Scalar> bp = detail::ifft2_centered<Scalar>(kernel.transfer * spectrum);
    contrasts[j] = std::sqrt(detail::window_stddev(bp, grid, radius_px));
  });
  return normalize_inverse_contrast(contrasts);
}

}  // namespace holotomo
