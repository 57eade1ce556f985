#pragma once

#include "holotomo/field.hpp"

#include <filesystem>

namespace holotomo::io {

// Binary field container, little-endian throughout:
//   magic   "HTF1"
//   version u16 (currently 1)
//   kind    u16 (0 = single field, 1 = volume)
//   nx, ny, nz                   u32
//   dx, dy, dz, wavelength, na,
//   magnification, z_center      f64
//   payload: interleaved (re, im) f64, x fastest, then y, then z
enum class FieldKind : std::uint16_t { field2d = 0, volume = 1 };

FieldKind peek_kind(const std::filesystem::path& path);

void save_field(const std::filesystem::path& path, const Field2D<double>& f);
void save_volume(const std::filesystem::path& path, const FieldVolume<double>& u);

Field2D<double> load_field(const std::filesystem::path& path);
FieldVolume<double> load_volume(const std::filesystem::path& path);

}  // namespace holotomo::io
