#include "holotomo/io/image_io.hpp"

#include "holotomo/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

namespace holotomo::io {

namespace {

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

const std::array<std::uint32_t, 256>& crc_table() {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t n = 0; n < 256; ++n) {
      std::uint32_t c = n;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      t[n] = c;
    }
    return t;
  }();
  return table;
}

std::uint32_t crc32(const std::string& data) {
  std::uint32_t c = 0xffffffffu;
  for (unsigned char ch : data) c = crc_table()[(c ^ ch) & 0xffu] ^ (c >> 8);
  return c ^ 0xffffffffu;
}

std::uint32_t adler32(const std::string& data) {
  std::uint32_t a = 1, b = 0;
  for (unsigned char ch : data) {
    a = (a + ch) % 65521u;
    b = (b + a) % 65521u;
  }
  return (b << 16) | a;
}

void put_u32be(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>(v & 0xff));
}

void append_chunk(std::string& out, const char type[4], const std::string& payload) {
  put_u32be(out, static_cast<std::uint32_t>(payload.size()));
  std::string body(type, 4);
  body += payload;
  out += body;
  put_u32be(out, crc32(body));
}

// zlib stream made of stored (uncompressed) deflate blocks.
std::string zlib_stored(const std::string& raw) {
  std::string z;
  z.push_back(0x78);
  z.push_back(0x01);
  size_t pos = 0;
  do {
    const size_t n = std::min<size_t>(raw.size() - pos, 65535);
    const bool last = pos + n == raw.size();
    z.push_back(last ? 1 : 0);
    z.push_back(static_cast<char>(n & 0xff));
    z.push_back(static_cast<char>((n >> 8) & 0xff));
    z.push_back(static_cast<char>(~n & 0xff));
    z.push_back(static_cast<char>((~n >> 8) & 0xff));
    z.append(raw, pos, n);
    pos += n;
  } while (pos < raw.size());
  put_u32be(z, adler32(raw));
  return z;
}

void write_png(const std::filesystem::path& path, int width, int height, int channels,
               const std::string& raster) {
  std::string png("\x89PNG\r\n\x1a\n", 8);
  std::string ihdr;
  put_u32be(ihdr, static_cast<std::uint32_t>(width));
  put_u32be(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);                              // bit depth
  ihdr.push_back(channels == 1 ? 0 : 2);          // gray / rgb
  ihdr.push_back(0);
  ihdr.push_back(0);
  ihdr.push_back(0);
  append_chunk(png, "IHDR", ihdr);
  append_chunk(png, "IDAT", zlib_stored(raster));
  append_chunk(png, "IEND", "");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path.string());
  out.write(png.data(), static_cast<std::streamsize>(png.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace

void save_pgm16(const std::filesystem::path& path, const RealArrayXd& counts) {
  const int nx = static_cast<int>(counts.rows());
  const int ny = static_cast<int>(counts.cols());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path.string());
  out << "P5\n" << nx << " " << ny << "\n65535\n";
  std::string raster;
  raster.reserve(static_cast<size_t>(nx) * ny * 2);
  for (int row = 0; row < ny; ++row) {
    for (int col = 0; col < nx; ++col) {
      const double v = std::clamp(counts(col, row), 0.0, 65535.0);
      const auto s = static_cast<std::uint16_t>(std::lround(v));
      raster.push_back(static_cast<char>((s >> 8) & 0xff));
      raster.push_back(static_cast<char>(s & 0xff));
    }
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out) throw DataError("write failed: " + path.string());
}

RealArrayXd load_pgm16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path.string());
  auto next_token = [&in, &path]() {
    std::string tok;
    while (in) {
      int c = in.get();
      if (c == '#') {
        while (in && in.get() != '\n') {}
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) return tok;
        continue;
      }
      if (c == EOF) break;
      tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw DataError("truncated PGM header: " + path.string());
    return tok;
  };
  if (next_token() != "P5") throw DataError("not a binary PGM: " + path.string());
  const int nx = std::stoi(next_token());
  const int ny = std::stoi(next_token());
  const long maxval = std::stol(next_token());
  if (nx < 1 || ny < 1 || nx > (1 << 20) || ny > (1 << 20))
    throw DataError("implausible PGM dimensions: " + path.string());
  if (maxval < 1 || maxval > 65535) throw DataError("unsupported PGM maxval: " + path.string());
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<char> buf(static_cast<size_t>(nx) * ny * bytes);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    throw DataError("truncated PGM raster: " + path.string());
  RealArrayXd counts(nx, ny);
  const unsigned char* b = reinterpret_cast<const unsigned char*>(buf.data());
  size_t k = 0;
  for (int row = 0; row < ny; ++row) {
    for (int col = 0; col < nx; ++col) {
      if (bytes == 2) {
        counts(col, row) = static_cast<double>((b[k] << 8) | b[k + 1]);
        k += 2;
      } else {
        counts(col, row) = static_cast<double>(b[k]);
        k += 1;
      }
    }
  }
  return counts;
}

void save_png_gray8(const std::filesystem::path& path, const RealArrayXd& values) {
  const int nx = static_cast<int>(values.rows());
  const int ny = static_cast<int>(values.cols());
  std::string raster;
  raster.reserve(static_cast<size_t>(ny) * (nx + 1));
  for (int row = 0; row < ny; ++row) {
    raster.push_back(0);  // filter: none
    for (int col = 0; col < nx; ++col)
      raster.push_back(static_cast<char>(to_byte(values(col, row))));
  }
  write_png(path, nx, ny, 1, raster);
}

void save_png_rgb8(const std::filesystem::path& path, const RealArrayXd& r, const RealArrayXd& g,
                   const RealArrayXd& b) {
  const int nx = static_cast<int>(r.rows());
  const int ny = static_cast<int>(r.cols());
  if (g.rows() != nx || g.cols() != ny || b.rows() != nx || b.cols() != ny)
    throw DataError("png: mismatched channel dimensions");
  std::string raster;
  raster.reserve(static_cast<size_t>(ny) * (3 * nx + 1));
  for (int row = 0; row < ny; ++row) {
    raster.push_back(0);
    for (int col = 0; col < nx; ++col) {
      raster.push_back(static_cast<char>(to_byte(r(col, row))));
      raster.push_back(static_cast<char>(to_byte(g(col, row))));
      raster.push_back(static_cast<char>(to_byte(b(col, row))));
    }
  }
  write_png(path, nx, ny, 3, raster);
}

void diverging_colormap(const RealArrayXd& values, RealArrayXd& r, RealArrayXd& g,
                        RealArrayXd& b) {
  const auto lerp = [](double a, double c, double t) { return a + (c - a) * t; };
  r.resize(values.rows(), values.cols());
  g.resize(values.rows(), values.cols());
  b.resize(values.rows(), values.cols());
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    const double t = std::clamp(values.data()[k], 0.0, 1.0);
    double cr, cg, cb;
    if (t < 0.5) {  // blue (59,76,192) -> light gray (221,221,221)
      const double s = t * 2.0;
      cr = lerp(59, 221, s);
      cg = lerp(76, 221, s);
      cb = lerp(192, 221, s);
    } else {  // light gray -> red (180,4,38)
      const double s = (t - 0.5) * 2.0;
      cr = lerp(221, 180, s);
      cg = lerp(221, 4, s);
      cb = lerp(221, 38, s);
    }
    r.data()[k] = cr / 255.0;
    g.data()[k] = cg / 255.0;
    b.data()[k] = cb / 255.0;
  }
}

}  // namespace holotomo::io
