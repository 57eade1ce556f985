#include "holotomo/io/field_file.hpp"

#include "holotomo/errors.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace holotomo::io {

namespace {

constexpr char kMagic[4] = {'H', 'T', 'F', '1'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

struct Reader {
  std::ifstream in;
  std::filesystem::path path;

  explicit Reader(const std::filesystem::path& p) : in(p, std::ios::binary), path(p) {
    if (!in) throw DataError("cannot open file: " + p.string());
  }

  void raw(char* dst, std::streamsize n, const char* what) {
    in.read(dst, n);
    if (in.gcount() != n) throw DataError(std::string("truncated ") + what + ": " + path.string());
  }

  std::uint16_t u16() {
    unsigned char b[2];
    raw(reinterpret_cast<char*>(b), 2, "header");
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
  }

  std::uint32_t u32() {
    unsigned char b[4];
    raw(reinterpret_cast<char*>(b), 4, "header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  }

  double f64() {
    unsigned char b[8];
    raw(reinterpret_cast<char*>(b), 8, "header");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
  }
};

struct Header {
  FieldKind kind;
  GridSpec grid;
  std::uint32_t nz;
  double z_center;
};

Header read_header(Reader& r) {
  char magic[4];
  r.raw(magic, 4, "header");
  if (std::memcmp(magic, kMagic, 4) != 0) throw DataError("bad magic: " + r.path.string());
  const std::uint16_t version = r.u16();
  if (version != kVersion) throw DataError("unsupported version: " + r.path.string());
  const std::uint16_t kind = r.u16();
  if (kind > 1) throw DataError("unknown field kind: " + r.path.string());
  Header h;
  h.kind = static_cast<FieldKind>(kind);
  const std::uint32_t nx = r.u32();
  const std::uint32_t ny = r.u32();
  h.nz = r.u32();
  if (nx == 0 || ny == 0 || h.nz == 0 || nx > (1u << 20) || ny > (1u << 20) ||
      static_cast<std::uint64_t>(nx) * ny * h.nz > (1ull << 28))
    throw DataError("implausible dimensions: " + r.path.string());
  h.grid.nx = static_cast<int>(nx);
  h.grid.ny = static_cast<int>(ny);
  h.grid.dx = r.f64();
  h.grid.dy = r.f64();
  h.grid.dz = r.f64();
  h.grid.wavelength = r.f64();
  h.grid.na = r.f64();
  h.grid.magnification = r.f64();
  h.z_center = r.f64();
  return h;
}

void write_file(const std::filesystem::path& path, FieldKind kind, const GridSpec& grid,
                std::uint32_t nz, double z_center,
                const std::vector<const ComplexArrayXd*>& slices) {
  std::string header;
  header.append(kMagic, 4);
  put_u16(header, kVersion);
  put_u16(header, static_cast<std::uint16_t>(kind));
  put_u32(header, static_cast<std::uint32_t>(grid.nx));
  put_u32(header, static_cast<std::uint32_t>(grid.ny));
  put_u32(header, nz);
  put_f64(header, grid.dx);
  put_f64(header, grid.dy);
  put_f64(header, grid.dz);
  put_f64(header, grid.wavelength);
  put_f64(header, grid.na);
  put_f64(header, grid.magnification);
  put_f64(header, z_center);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::string payload;
  payload.reserve(static_cast<size_t>(grid.nx) * grid.ny * 16);
  for (const auto* s : slices) {
    payload.clear();
    const auto* p = s->data();  // column-major: x fastest, then y
    for (Eigen::Index k = 0; k < s->size(); ++k) {
      put_f64(payload, p[k].real());
      put_f64(payload, p[k].imag());
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  }
  if (!out) throw DataError("write failed: " + path.string());
}

void read_payload(Reader& r, ComplexArrayXd& slice) {
  std::vector<char> buf(static_cast<size_t>(slice.size()) * 16);
  r.raw(buf.data(), static_cast<std::streamsize>(buf.size()), "payload");
  const unsigned char* b = reinterpret_cast<const unsigned char*>(buf.data());
  auto* p = slice.data();
  for (Eigen::Index k = 0; k < slice.size(); ++k) {
    std::uint64_t re = 0, im = 0;
    for (int i = 0; i < 8; ++i) re |= static_cast<std::uint64_t>(b[16 * k + i]) << (8 * i);
    for (int i = 0; i < 8; ++i) im |= static_cast<std::uint64_t>(b[16 * k + 8 + i]) << (8 * i);
    double dre, dim;
    std::memcpy(&dre, &re, 8);
    std::memcpy(&dim, &im, 8);
    p[k] = std::complex<double>(dre, dim);
  }
}

void expect_eof(Reader& r) {
  char c;
  r.in.read(&c, 1);
  if (!r.in.eof()) throw DataError("trailing bytes: " + r.path.string());
}

}  // namespace

FieldKind peek_kind(const std::filesystem::path& path) {
  Reader r(path);
  return read_header(r).kind;
}

void save_field(const std::filesystem::path& path, const Field2D<double>& f) {
  f.validate();
  write_file(path, FieldKind::field2d, f.grid, 1, 0.0, {&f.values});
}

void save_volume(const std::filesystem::path& path, const FieldVolume<double>& u) {
  u.validate();
  std::vector<const ComplexArrayXd*> slices;
  slices.reserve(u.slices.size());
  for (const auto& s : u.slices) slices.push_back(&s);
  write_file(path, FieldKind::volume, u.grid, static_cast<std::uint32_t>(u.nz()), u.box.z_center,
             slices);
}

Field2D<double> load_field(const std::filesystem::path& path) {
  Reader r(path);
  const Header h = read_header(r);
  if (h.kind != FieldKind::field2d) throw DataError("not a single-field file: " + path.string());
  if (h.nz != 1) throw DataError("field file with nz != 1: " + path.string());
  Field2D<double> f{h.grid, ComplexArrayXd(h.grid.nx, h.grid.ny)};
  read_payload(r, f.values);
  expect_eof(r);
  f.validate();
  return f;
}

FieldVolume<double> load_volume(const std::filesystem::path& path) {
  Reader r(path);
  const Header h = read_header(r);
  if (h.kind != FieldKind::volume) throw DataError("not a volume file: " + path.string());
  FieldVolume<double> u{h.grid, AxialBox{static_cast<int>(h.nz), h.z_center}, {}};
  u.slices.assign(h.nz, ComplexArrayXd(h.grid.nx, h.grid.ny));
  for (auto& s : u.slices) read_payload(r, s);
  expect_eof(r);
  u.validate();
  return u;
}

}  // namespace holotomo::io
