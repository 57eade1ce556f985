#pragma once

#include "holotomo/core.hpp"
#include "holotomo/errors.hpp"

#include <string>

namespace holotomo {

// Physical sampling metadata. Lateral pitches are object-plane pitches,
// i.e. sensor pitch divided by magnification. All lengths in micrometers,
// spatial frequencies in cycles per micrometer.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double dx = 0.0;
  double dy = 0.0;
  double dz = 0.0;
  double wavelength = 0.0;
  double na = 0.0;
  double magnification = 1.0;

  double wavenumber() const { return 2.0 * kPi / wavelength; }
  double fx_step() const { return 1.0 / (nx * dx); }
  double fy_step() const { return 1.0 / (ny * dy); }

  // Spatial origin sits at index (nx/2, ny/2), matching the centered
  // frequency layout used by the transforms.
  double x_at(int i) const { return (i - nx / 2) * dx; }
  double y_at(int j) const { return (j - ny / 2) * dy; }
  double fx_at(int i) const { return (i - nx / 2) * fx_step(); }
  double fy_at(int j) const { return (j - ny / 2) * fy_step(); }

  void validate() const {
    if (nx < 2 || ny < 2) throw ConfigError("grid: nx and ny must be >= 2");
    if (nx % 2 != 0 || ny % 2 != 0)
      throw ConfigError("grid: nx and ny must be even for unambiguous zero-frequency centering");
    if (!(dx > 0.0) || !(dy > 0.0) || !(dz > 0.0))
      throw ConfigError("grid: sample pitches must be positive");
    if (!(wavelength > 0.0)) throw ConfigError("grid: wavelength must be positive");
    if (!(na > 0.0) || !(na < 1.0)) throw ConfigError("grid: NA must lie in (0, 1)");
    if (!(magnification > 0.0)) throw ConfigError("grid: magnification must be positive");
  }
};

inline bool operator==(const GridSpec& a, const GridSpec& b) {
  return a.nx == b.nx && a.ny == b.ny && a.dx == b.dx && a.dy == b.dy && a.dz == b.dz &&
         a.wavelength == b.wavelength && a.na == b.na && a.magnification == b.magnification;
}

inline bool operator!=(const GridSpec& a, const GridSpec& b) { return !(a == b); }

// Axial reconstruction box. z_center is the distance from the detector
// plane to the box center; slices are spaced grid.dz apart.
struct AxialBox {
  int nz = 1;
  double z_center = 0.0;

  void validate(const GridSpec& grid) const {
    if (nz < 1) throw ConfigError("box: nz must be >= 1");
    const double nearest = z_center - 0.5 * (nz - 1) * grid.dz;
    if (!(nearest > 0.0))
      throw ConfigError("box: all slice distances must be positive (box touches the detector)");
  }
};

inline bool operator==(const AxialBox& a, const AxialBox& b) {
  return a.nz == b.nz && a.z_center == b.z_center;
}

// Distance from the detector plane to slice j. Slice 0 is the farthest
// slice; distances decrease with j.
inline double slice_distance(const GridSpec& grid, const AxialBox& box, int j) {
  return box.z_center + (0.5 * (box.nz - 1) - j) * grid.dz;
}

}  // namespace holotomo
