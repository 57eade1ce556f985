#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "holotomo/io/csv.hpp"
#include "holotomo/io/field_file.hpp"
#include "holotomo/io/image_io.hpp"
#include "holotomo/io/pipeline.hpp"
#include "holotomo/io/run_config.hpp"

#include "test_util.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

using namespace holotomo;
namespace io = holotomo::io;
using testutil::Rng;

namespace {

std::filesystem::path temp_dir() {
  static const auto dir = [] {
    auto d = std::filesystem::temp_directory_path() / "holotomo_io_tests";
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("field file round trip is bitwise") {
  GridSpec g = testutil::small_grid(8, 6);
  Rng rng(3);
  Field2D<double> f{g, rng.complex_array(8, 6)};
  const auto path = temp_dir() / "field.htf";
  io::save_field(path, f);
  CHECK(io::peek_kind(path) == io::FieldKind::field2d);
  const auto back = io::load_field(path);
  CHECK(back.grid == g);
  CHECK((back.values - f.values).abs().maxCoeff() == 0.0);

  const auto path2 = temp_dir() / "field2.htf";
  io::save_field(path2, back);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("volume file round trip is bitwise") {
  GridSpec g = testutil::small_grid(8, 8);
  AxialBox box{3, 9.25};
  Rng rng(5);
  const auto u = rng.volume(g, box);
  const auto path = temp_dir() / "volume.htf";
  io::save_volume(path, u);
  CHECK(io::peek_kind(path) == io::FieldKind::volume);
  const auto back = io::load_volume(path);
  CHECK(back.grid == g);
  CHECK(back.box.nz == 3);
  CHECK(back.box.z_center == 9.25);
  for (int j = 0; j < 3; ++j) CHECK((back.slices[j] - u.slices[j]).abs().maxCoeff() == 0.0);
}

TEST_CASE("malformed field files are rejected") {
  GridSpec g = testutil::small_grid(8, 6);
  Rng rng(7);
  Field2D<double> f{g, rng.complex_array(8, 6)};
  const auto path = temp_dir() / "mangle.htf";
  io::save_field(path, f);
  std::string bytes = slurp(path);

  SUBCASE("bad magic") {
    bytes[0] = 'X';
    spit(path, bytes);
    CHECK_THROWS_WITH_AS(io::load_field(path), ("bad magic: " + path.string()).c_str(), DataError);
  }

  SUBCASE("unsupported version") {
    bytes[4] = 9;
    spit(path, bytes);
    CHECK_THROWS_AS(io::load_field(path), DataError);
  }

  SUBCASE("truncated payload") {
    spit(path, bytes.substr(0, bytes.size() - 5));
    CHECK_THROWS_AS(io::load_field(path), DataError);
  }

  SUBCASE("trailing bytes") {
    spit(path, bytes + "xx");
    CHECK_THROWS_AS(io::load_field(path), DataError);
  }

  SUBCASE("kind mismatch") { CHECK_THROWS_AS(io::load_volume(path), DataError); }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(io::load_field(temp_dir() / "does_not_exist.htf"), DataError);
  }
}

TEST_CASE("pgm round trip") {
  RealArrayXd counts(6, 4);
  Rng rng(11);
  for (Eigen::Index k = 0; k < counts.size(); ++k)
    counts.data()[k] = std::floor(rng.uniform(0.0, 65535.0));
  const auto path = temp_dir() / "holo.pgm";
  io::save_pgm16(path, counts);
  const auto back = io::load_pgm16(path);
  CHECK(back.rows() == 6);
  CHECK(back.cols() == 4);
  CHECK((back - counts).abs().maxCoeff() == 0.0);
}

TEST_CASE("png structure is valid and deterministic") {
  RealArrayXd img(5, 3);
  for (Eigen::Index k = 0; k < img.size(); ++k) img.data()[k] = static_cast<double>(k) / 14.0;
  const auto path = temp_dir() / "img.png";
  io::save_png_gray8(path, img);
  const std::string bytes = slurp(path);
  REQUIRE(bytes.size() > 45);
  CHECK(std::memcmp(bytes.data(), "\x89PNG\r\n\x1a\n", 8) == 0);
  // IHDR declares 5x3, bit depth 8, grayscale
  CHECK(std::memcmp(bytes.data() + 12, "IHDR", 4) == 0);
  const auto be32 = [&](size_t off) {
    return (static_cast<unsigned>(static_cast<unsigned char>(bytes[off])) << 24) |
           (static_cast<unsigned>(static_cast<unsigned char>(bytes[off + 1])) << 16) |
           (static_cast<unsigned>(static_cast<unsigned char>(bytes[off + 2])) << 8) |
           static_cast<unsigned>(static_cast<unsigned char>(bytes[off + 3]));
  };
  CHECK(be32(16) == 5);
  CHECK(be32(20) == 3);
  CHECK(bytes[24] == 8);
  CHECK(bytes[25] == 0);

  // stored deflate blocks decode back to the filter-prefixed raster
  size_t pos = 8;
  std::string idat;
  while (pos + 8 <= bytes.size()) {
    const unsigned len = be32(pos);
    const std::string type = bytes.substr(pos + 4, 4);
    if (type == "IDAT") idat += bytes.substr(pos + 8, len);
    pos += 12 + len;
  }
  REQUIRE(idat.size() > 6);
  std::string raw;
  size_t z = 2;  // skip zlib header
  while (true) {
    const unsigned char final = static_cast<unsigned char>(idat[z]) & 1;
    const unsigned n = static_cast<unsigned char>(idat[z + 1]) |
                       (static_cast<unsigned>(static_cast<unsigned char>(idat[z + 2])) << 8);
    raw += idat.substr(z + 5, n);
    z += 5 + n;
    if (final) break;
  }
  REQUIRE(raw.size() == 3 * (5 + 1));
  for (int row = 0; row < 3; ++row) {
    CHECK(raw[row * 6] == 0);
    for (int col = 0; col < 5; ++col) {
      const int want = static_cast<int>(std::lround(img(col, row) * 255.0));
      CHECK(static_cast<int>(static_cast<unsigned char>(raw[row * 6 + 1 + col])) == want);
    }
  }

  const auto path2 = temp_dir() / "img2.png";
  io::save_png_gray8(path2, img);
  CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("csv format") {
  const auto path = temp_dir() / "table.csv";
  io::save_csv(path, {"a", "b"}, {{1.0, 2.5}, {0.1234567890123456789, 3.0}});
  const std::string text = slurp(path);
  CHECK(text.find("a,b\r\n") == 0);
  CHECK(text.find("1,2.5\r\n") != std::string::npos);
  // doubles survive a round trip through the printed representation
  const auto comma = text.rfind(",3");
  const auto line_start = text.rfind("\n", comma);
  const std::string cell = text.substr(line_start + 1, comma - line_start - 1);
  CHECK(std::stod(cell) == 0.1234567890123456789);
}

TEST_CASE("run config parsing") {
  SUBCASE("defaults are the instrument-scale scene") {
    const auto cfg = io::RunConfig::parse_string("", "test");
    CHECK(cfg.grid.nx == 280);
    CHECK(cfg.grid.pixel_pitch == 3.45);
    CHECK(cfg.box.nz == 5);
    const GridSpec g = cfg.make_grid();
    CHECK(g.dx == doctest::Approx(3.45 / 40.0));
  }

  SUBCASE("sections and keys are applied") {
    const std::string text =
        "[grid]\n"
        "nx = 64\n"
        "ny = 64\n"
        "pixel_pitch = 10\n"
        "magnification = 40\n"
        "[box]\n"
        "nz = 3\n"
        "dz = 0.5\n"
        "z_center = 6\n"
        "[phantom]\n"
        "support_scale = 2.0\n"
        "cell = 0 0 2.0 1.2 1 1\n"
        "cell = 3 1 1.5 0.8 0 2 dip 3.2 1.1 0.5 0.4\n"
        "[mgd]\n"
        "max_iters = 17\n"
        "weights = off\n"
        "[tv]\n"
        "epsilon = 0.001\n";
    const auto cfg = io::RunConfig::parse_string(text, "test");
    CHECK(cfg.grid.nx == 64);
    CHECK(cfg.box.z_center == 6.0);
    CHECK(cfg.phantom.cells.size() == 2);
    CHECK(cfg.phantom.cells[1].dip.has_value());
    CHECK(cfg.phantom.cells[1].dip->depth == 0.4);
    CHECK(cfg.mgd.max_iters == 17);
    CHECK_FALSE(cfg.mgd.weights);
    CHECK(cfg.tv.epsilon == 0.001);
  }

  SUBCASE("unknown keys are rejected with the line number") {
    const std::string text = "[grid]\nnx = 64\nny = 64\nbogus = 1\n";
    try {
      io::RunConfig::parse_string(text, "test");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
      CHECK(std::string(e.what()).find("bogus") != std::string::npos);
    }
  }

  SUBCASE("unknown sections and stray keys are rejected") {
    CHECK_THROWS_AS(io::RunConfig::parse_string("[nope]\n", "test"), ConfigError);
    CHECK_THROWS_AS(io::RunConfig::parse_string("nx = 3\n", "test"), ConfigError);
    CHECK_THROWS_AS(io::RunConfig::parse_string("[grid]\nnx\n", "test"), ConfigError);
  }

  SUBCASE("invariants are enforced at load") {
    CHECK_THROWS_AS(io::RunConfig::parse_string("[grid]\nnx = 63\n", "test"), ConfigError);
    CHECK_THROWS_AS(io::RunConfig::parse_string("[box]\nz_center = 0.1\n", "test"), ConfigError);
    CHECK_THROWS_AS(io::RunConfig::parse_string("[mgd]\ntheta_stop = 0.3\n", "test"), ConfigError);
    CHECK_THROWS_AS(io::RunConfig::parse_string("[focus]\nz_step = -1\n", "test"), ConfigError);
  }

  SUBCASE("auto and inf sentinels") {
    const auto cfg = io::RunConfig::parse_string(
        "[box]\nz_center = auto\n[tv]\nepsilon = auto\n[noise]\nsnr_db = inf\n", "test");
    CHECK_FALSE(cfg.box.z_center.has_value());
    CHECK_FALSE(cfg.tv.epsilon.has_value());
    CHECK(std::isinf(cfg.noise.snr_db));
  }

  SUBCASE("malformed numbers name the line") {
    try {
      io::RunConfig::parse_string("[grid]\nnx = twelve\n", "test");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
}

TEST_CASE("pipeline stages write and reload artifacts") {
  const auto dir = temp_dir() / "pipeline";
  std::filesystem::remove_all(dir);
  const std::string cfg_text =
      "[grid]\n"
      "nx = 128\n"
      "ny = 128\n"
      "[box]\n"
      "nz = 3\n"
      "z_center = 6\n"
      "[phantom]\n"
      "support_scale = 2.0\n"
      "cell = 0 0 2.0 1.2 1 1\n"
      "[focus]\n"
      "z_max = 9\n"
      "[mgd]\n"
      "max_iters = 10\n"
      "[run]\n"
      "seed = 3\n";
  const auto cfg = io::RunConfig::parse_string(cfg_text, "test");
  std::ostringstream log;

  io::cmd_simulate(cfg, dir, log);
  CHECK(std::filesystem::exists(dir / "hologram.htf"));
  CHECK(std::filesystem::exists(dir / "hologram.pgm"));
  CHECK(std::filesystem::exists(dir / "truth_volume.htf"));

  const auto truth = io::load_volume(dir / "truth_volume.htf");
  CHECK(truth.nz() == 3);

  io::cmd_demodulate(cfg, dir / "hologram.htf", dir, log);
  CHECK(std::filesystem::exists(dir / "field.htf"));

  io::cmd_focus(cfg, dir / "field.htf", dir, log);
  CHECK(std::filesystem::exists(dir / "focus.csv"));

  io::cmd_reconstruct(cfg, dir / "hologram.htf", false, dir, log);
  CHECK(std::filesystem::exists(dir / "volume.htf"));
  CHECK(std::filesystem::exists(dir / "history.csv"));
  CHECK(std::filesystem::exists(dir / "summary.txt"));
  CHECK(std::filesystem::exists(dir / "amplitude_0.png"));
  CHECK(std::filesystem::exists(dir / "phase_2.png"));

  io::cmd_inspect(cfg, dir / "volume.htf", {}, dir, log);
  io::cmd_inspect(cfg, dir / "field.htf", io::SweepSpec{0.0, 5.0, 1.0}, dir, log);
  CHECK(std::filesystem::exists(dir / "sweep_xz.png"));

  io::cmd_export(dir / "volume.htf", dir / "exported", log);
  CHECK(std::filesystem::exists(dir / "exported" / "amplitude_1.png"));

  SUBCASE("missing inputs carry the path in the error") {
    try {
      io::cmd_reconstruct(cfg, dir / "nothing.pgm", false, dir, log);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("nothing.pgm") != std::string::npos);
    }
  }
}

TEST_CASE("exit code mapping") {
  std::ostringstream err;
  CHECK(io::run_guarded(err, [] {}) == io::kExitOk);
  CHECK(io::run_guarded(err, [] { throw ConfigError("x"); }) == io::kExitConfig);
  CHECK(io::run_guarded(err, [] { throw DataError("x"); }) == io::kExitData);
  CHECK(io::run_guarded(err, [] { throw NumericalError("x"); }) == io::kExitNumerical);
  CHECK(io::run_guarded(err, [] { throw std::runtime_error("x"); }) == io::kExitData);
}
