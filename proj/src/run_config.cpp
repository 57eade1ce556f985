#include "holotomo/io/run_config.hpp"

#include "holotomo/errors.hpp"

#include <fstream>
#include <sstream>

namespace holotomo::io {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct LineContext {
  const std::string& name;
  int line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(name + ": line " + std::to_string(line) + ": " + msg);
  }
};

double parse_double(const LineContext& ctx, const std::string& v) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) ctx.fail("malformed number '" + v + "'");
    return d;
  } catch (const std::exception&) {
    ctx.fail("malformed number '" + v + "'");
  }
}

int parse_int(const LineContext& ctx, const std::string& v) {
  try {
    size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) ctx.fail("malformed integer '" + v + "'");
    return i;
  } catch (const std::exception&) {
    ctx.fail("malformed integer '" + v + "'");
  }
}

bool parse_bool(const LineContext& ctx, const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  ctx.fail("expected on/off, got '" + v + "'");
}

PhantomCell parse_cell(const LineContext& ctx, const std::string& v) {
  std::istringstream in(v);
  PhantomCell c;
  if (!(in >> c.cx >> c.cy >> c.radius >> c.peak_phase >> c.slice_lo >> c.slice_hi))
    ctx.fail("cell needs: cx cy radius peak_phase slice_lo slice_hi [dip cx cy radius depth]");
  std::string tag;
  if (in >> tag) {
    if (tag != "dip") ctx.fail("unexpected token '" + tag + "' in cell");
    PhantomDip d;
    if (!(in >> d.cx >> d.cy >> d.radius >> d.depth)) ctx.fail("dip needs: cx cy radius depth");
    c.dip = d;
  }
  std::string rest;
  if (in >> rest) ctx.fail("trailing token '" + rest + "' in cell");
  return c;
}

}  // namespace

GridSpec RunConfig::make_grid() const {
  GridSpec g;
  g.nx = grid.nx;
  g.ny = grid.ny;
  if (!(grid.magnification > 0.0)) throw ConfigError("grid: magnification must be positive");
  g.dx = grid.pixel_pitch / grid.magnification;
  g.dy = grid.pixel_pitch / grid.magnification;
  g.dz = box.dz;
  g.wavelength = grid.wavelength;
  g.na = grid.na;
  g.magnification = grid.magnification;
  g.validate();
  return g;
}

PhantomSpec RunConfig::make_phantom_spec(const GridSpec& g) const {
  PhantomSpec spec;
  spec.grid = g;
  spec.box = AxialBox{box.nz, box.z_center.value_or(9.0)};
  spec.support_scale = phantom.support_scale;
  spec.cells = phantom.cells;
  if (spec.cells.empty()) {
    PhantomCell c;
    c.cx = 0.0;
    c.cy = 0.0;
    c.radius = 3.5;
    c.peak_phase = 1.5;
    c.slice_lo = c.slice_hi = box.nz / 2;
    spec.cells.push_back(c);
  }
  spec.validate();
  return spec;
}

RunConfig RunConfig::parse_string(const std::string& text, const std::string& name) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  LineContext ctx{name, 0};
  while (std::getline(in, raw)) {
    ++ctx.line;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') ctx.fail("malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "run" && section != "grid" && section != "box" && section != "phantom" &&
          section != "reference" && section != "noise" && section != "ftm" &&
          section != "window" && section != "focus" && section != "tv" && section != "mgd")
        ctx.fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) ctx.fail("expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) ctx.fail("expected key = value");
    if (section.empty()) ctx.fail("key '" + key + "' outside any section");
    const bool is_auto = value == "auto";

    auto unknown = [&]() -> void { ctx.fail("unknown key '" + key + "' in [" + section + "]"); };

    if (section == "run") {
      if (key == "seed") {
        try {
          size_t pos = 0;
          cfg.seed = std::stoull(value, &pos);
          if (pos != value.size()) ctx.fail("malformed seed '" + value + "'");
        } catch (const ConfigError&) {
          throw;
        } catch (const std::exception&) {
          ctx.fail("malformed seed '" + value + "'");
        }
      } else
        unknown();
    } else if (section == "grid") {
      if (key == "nx")
        cfg.grid.nx = parse_int(ctx, value);
      else if (key == "ny")
        cfg.grid.ny = parse_int(ctx, value);
      else if (key == "pixel_pitch")
        cfg.grid.pixel_pitch = parse_double(ctx, value);
      else if (key == "magnification")
        cfg.grid.magnification = parse_double(ctx, value);
      else if (key == "wavelength")
        cfg.grid.wavelength = parse_double(ctx, value);
      else if (key == "na")
        cfg.grid.na = parse_double(ctx, value);
      else
        unknown();
    } else if (section == "box") {
      if (key == "nz")
        cfg.box.nz = parse_int(ctx, value);
      else if (key == "dz")
        cfg.box.dz = parse_double(ctx, value);
      else if (key == "z_center")
        cfg.box.z_center = is_auto ? std::nullopt : std::optional<double>(parse_double(ctx, value));
      else
        unknown();
    } else if (section == "phantom") {
      if (key == "support_scale")
        cfg.phantom.support_scale = parse_double(ctx, value);
      else if (key == "cell")
        cfg.phantom.cells.push_back(parse_cell(ctx, value));
      else
        unknown();
    } else if (section == "reference") {
      if (key == "carrier_x")
        cfg.reference.carrier_x = parse_double(ctx, value);
      else if (key == "carrier_y")
        cfg.reference.carrier_y = parse_double(ctx, value);
      else if (key == "amplitude")
        cfg.reference.amplitude = parse_double(ctx, value);
      else
        unknown();
    } else if (section == "noise") {
      if (key == "snr_db")
        cfg.noise.snr_db = parse_double(ctx, value);
      else if (key == "quantize_bits")
        cfg.noise.quantize_bits = parse_int(ctx, value);
      else
        unknown();
    } else if (section == "ftm") {
      if (key == "mask_radius")
        cfg.ftm.mask_radius = is_auto ? std::nullopt : std::optional<double>(parse_double(ctx, value));
      else
        unknown();
    } else if (section == "window") {
      if (key == "gaussian_radius")
        cfg.window.gaussian_radius =
            is_auto ? std::nullopt : std::optional<double>(parse_double(ctx, value));
      else
        unknown();
    } else if (section == "focus") {
      if (key == "z_min")
        cfg.focus.z_min = parse_double(ctx, value);
      else if (key == "z_max")
        cfg.focus.z_max = parse_double(ctx, value);
      else if (key == "z_step")
        cfg.focus.z_step = parse_double(ctx, value);
      else if (key == "window_radius_px")
        cfg.focus.window_radius_px =
            is_auto ? std::nullopt : std::optional<int>(parse_int(ctx, value));
      else
        unknown();
    } else if (section == "tv") {
      if (key == "epsilon")
        cfg.tv.epsilon = is_auto ? std::nullopt : std::optional<double>(parse_double(ctx, value));
      else
        unknown();
    } else if (section == "mgd") {
      if (key == "max_iters")
        cfg.mgd.max_iters = parse_int(ctx, value);
      else if (key == "theta_stop")
        cfg.mgd.theta_stop = parse_double(ctx, value);
      else if (key == "theta_patience")
        cfg.mgd.theta_patience = parse_int(ctx, value);
      else if (key == "t_init")
        cfg.mgd.t_init = is_auto ? std::nullopt : std::optional<double>(parse_double(ctx, value));
      else if (key == "t_init_rel")
        cfg.mgd.t_init_rel = parse_double(ctx, value);
      else if (key == "t_decay")
        cfg.mgd.t_decay = parse_double(ctx, value);
      else if (key == "stall_window")
        cfg.mgd.stall_window = is_auto ? std::nullopt : std::optional<int>(parse_int(ctx, value));
      else if (key == "schedule") {
        if (value == "stall")
          cfg.mgd.schedule = StepSchedule::kStallWindow;
        else if (value == "increase")
          cfg.mgd.schedule = StepSchedule::kConsecutiveIncrease;
        else
          ctx.fail("schedule must be 'stall' or 'increase'");
      } else if (key == "t_floor_rel")
        cfg.mgd.t_floor_rel = parse_double(ctx, value);
      else if (key == "noise_amplitude")
        cfg.mgd.noise_amplitude = parse_double(ctx, value);
      else if (key == "weights")
        cfg.mgd.weights = parse_bool(ctx, value);
      else if (key == "e_d_max")
        cfg.mgd.e_d_max = parse_double(ctx, value);
      else
        unknown();
    }
  }

  // Enforce the nested invariants up front so a bad file fails at load.
  const GridSpec g = cfg.make_grid();
  if (cfg.box.z_center) AxialBox{cfg.box.nz, *cfg.box.z_center}.validate(g);
  cfg.make_phantom_spec(g);
  if (!(cfg.focus.z_min >= 0.0) || !(cfg.focus.z_min < cfg.focus.z_max) ||
      !(cfg.focus.z_step > 0.0))
    throw ConfigError(name + ": focus: need 0 <= z_min < z_max and z_step > 0");
  if (cfg.tv.epsilon && !(*cfg.tv.epsilon > 0.0))
    throw ConfigError(name + ": tv: epsilon must be positive");
  MgdConfig<double> probe;
  probe.max_iters = cfg.mgd.max_iters;
  probe.theta_stop = cfg.mgd.theta_stop;
  probe.theta_patience = cfg.mgd.theta_patience;
  probe.t_init = cfg.mgd.t_init.value_or(0.0);
  probe.t_init_rel = cfg.mgd.t_init_rel;
  probe.t_decay = cfg.mgd.t_decay;
  probe.stall_window = cfg.mgd.stall_window.value_or(10);
  probe.t_floor_rel = cfg.mgd.t_floor_rel;
  probe.noise_amplitude = cfg.mgd.noise_amplitude;
  probe.validate();
  if (cfg.noise.quantize_bits < 0 || cfg.noise.quantize_bits > 16)
    throw ConfigError(name + ": noise: quantize_bits must lie in [0, 16]");
  return cfg;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path.filename().string());
}

}  // namespace holotomo::io
