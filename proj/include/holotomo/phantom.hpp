#pragma once

#include "holotomo/field.hpp"
#include "holotomo/mgd.hpp"
#include "holotomo/propagation.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace holotomo {

// Localized phase depression inside a cell (parasite-like feature).
struct PhantomDip {
  double cx = 0.0;  // um
  double cy = 0.0;
  double radius = 0.0;
  double depth = 0.0;  // rad
};

// Disc-shaped pure-phase cell with a smooth super-Gaussian profile,
// occupying slices [slice_lo, slice_hi] of the box.
struct PhantomCell {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
  double peak_phase = 0.0;
  int slice_lo = 0;
  int slice_hi = 0;
  std::optional<PhantomDip> dip;
};

struct PhantomSpec {
  GridSpec grid;
  AxialBox box;
  double support_scale = 2.0;  // support radius as a multiple of the cell radius
  std::vector<PhantomCell> cells;

  void validate() const {
    grid.validate();
    box.validate(grid);
    if (!(support_scale > 0.0)) throw ConfigError("phantom: support_scale must be positive");
    for (const auto& c : cells) {
      if (!(c.radius > 0.0)) throw ConfigError("phantom: cell radius must be positive");
      if (!std::isfinite(c.peak_phase)) throw ConfigError("phantom: non-finite peak phase");
      if (c.slice_lo < 0 || c.slice_hi >= box.nz || c.slice_lo > c.slice_hi)
        throw ConfigError("phantom: slice occupancy outside the box");
      if (c.dip && !(c.dip->radius > 0.0)) throw ConfigError("phantom: dip radius must be positive");
    }
  }
};

// Unit-amplitude pure-phase slices inside the occupied planes, windowed
// to zero outside the cell support; unoccupied planes are exactly zero.
// The phase profile is a fourth-order super-Gaussian per cell, minus the
// dip profile where present.
template <class Scalar>
FieldVolume<Scalar> make_phantom(const PhantomSpec& spec) {
  spec.validate();
  const GridSpec& grid = spec.grid;
  FieldVolume<Scalar> u = zero_volume<Scalar>(grid, spec.box);
  for (int j = 0; j < spec.box.nz; ++j) {
    bool occupied = false;
    for (const auto& c : spec.cells)
      if (c.slice_lo <= j && j <= c.slice_hi) occupied = true;
    if (!occupied) continue;
    auto& slice = u.slices[j];
    for (int jy = 0; jy < grid.ny; ++jy) {
      const double y = grid.y_at(jy);
      for (int ix = 0; ix < grid.nx; ++ix) {
        const double x = grid.x_at(ix);
        double phase = 0.0;
        double support = 0.0;
        for (const auto& c : spec.cells) {
          if (j < c.slice_lo || j > c.slice_hi) continue;
          const double q = ((x - c.cx) * (x - c.cx) + (y - c.cy) * (y - c.cy)) / (c.radius * c.radius);
          phase += c.peak_phase * std::exp(-q * q);
          if (c.dip) {
            const double qd = ((x - c.dip->cx) * (x - c.dip->cx) + (y - c.dip->cy) * (y - c.dip->cy)) /
                              (c.dip->radius * c.dip->radius);
            phase -= c.dip->depth * std::exp(-qd * qd);
          }
          const double qs = q / (spec.support_scale * spec.support_scale);
          support = std::max(support, std::exp(-qs * qs * qs * qs));
        }
        slice(ix, jy) = std::complex<Scalar>(Scalar(support * std::cos(phase)),
                                             Scalar(support * std::sin(phase)));
      }
    }
  }
  return u;
}

// Tilted plane-wave reference. The carrier is realized on the nearest
// DFT bin; its phase is referenced to the array origin.
struct ReferenceSpec {
  double carrier_fx = 0.0;  // cycles/um
  double carrier_fy = 0.0;
  double amplitude = 1.0;
};

struct SimNoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();  // non-finite: noiseless
  int quantize_bits = 0;                                    // 0: no quantization
  std::uint64_t seed = 0;
};

// Off-axis hologram intensity |reference + forward_A(u)|^2, with optional
// additive Gaussian noise at the given SNR and optional uniform
// quantization. Deterministic for a fixed seed.
template <class Scalar>
Hologram<Scalar> simulate_hologram(const FieldVolume<Scalar>& u, const ReferenceSpec& ref,
                                   const SimNoiseSpec& noise = {}) {
  u.validate();
  const GridSpec& grid = u.grid;
  if (!(ref.amplitude > 0.0)) throw ConfigError("reference: amplitude must be positive");
  if (!(std::abs(ref.carrier_fx) < 0.5 / grid.dx) || !(std::abs(ref.carrier_fy) < 0.5 / grid.dy))
    throw DataError("reference: carrier at or above the Nyquist frequency");
  const int kx = static_cast<int>(std::lround(ref.carrier_fx * grid.nx * grid.dx));
  const int ky = static_cast<int>(std::lround(ref.carrier_fy * grid.ny * grid.dy));

  const Field2D<Scalar> s = forward_A(u);
  RealArray<Scalar> intensity(grid.nx, grid.ny);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double arg =
          2.0 * kPi * (static_cast<double>(kx) * i / grid.nx + static_cast<double>(ky) * j / grid.ny);
      const std::complex<Scalar> r(Scalar(ref.amplitude * std::cos(arg)),
                                   Scalar(ref.amplitude * std::sin(arg)));
      intensity(i, j) = std::norm(r + s.values(i, j));
    }
  }

  if (std::isfinite(noise.snr_db)) {
    const Scalar power = intensity.square().mean();
    const Scalar sigma = std::sqrt(power / Scalar(std::pow(10.0, noise.snr_db / 10.0)));
    detail::GaussianRng rng(noise.seed);
    auto* p = intensity.data();
    for (Eigen::Index k = 0; k < intensity.size(); ++k)
      p[k] = std::max(Scalar(0), p[k] + sigma * Scalar(rng.normal()));
  }

  if (noise.quantize_bits > 0) {
    if (noise.quantize_bits > 16) throw ConfigError("quantization: at most 16 bits");
    const Scalar levels = Scalar((1u << noise.quantize_bits) - 1u);
    const Scalar peak = intensity.maxCoeff();
    if (peak > Scalar(0))
      intensity = (intensity / peak * levels).round() * (peak / levels);
  }
  return {grid, std::move(intensity)};
}

}  // namespace holotomo
