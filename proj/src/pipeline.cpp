#include "holotomo/io/pipeline.hpp"

#include "holotomo/holotomo.hpp"
#include "holotomo/io/csv.hpp"
#include "holotomo/io/field_file.hpp"
#include "holotomo/io/image_io.hpp"

#include <algorithm>
#include <fstream>

namespace holotomo::io {

namespace {

namespace fs = std::filesystem;

void require_exists(const fs::path& p) {
  if (!fs::exists(p)) throw DataError("missing input file: " + p.string());
}

fs::path prepared_out_dir(const fs::path& out_dir) {
  if (!out_dir.empty()) fs::create_directories(out_dir);
  return out_dir;
}

CarrierSpec carrier_of(const RunConfig& cfg) {
  CarrierSpec c;
  c.fx = cfg.reference.carrier_x;
  c.fy = cfg.reference.carrier_y;
  c.mask_radius = cfg.ftm.mask_radius.value_or(0.0);
  return c;
}

GaussianWindowSpec window_of(const RunConfig& cfg, const GridSpec& g) {
  return {cfg.window.gaussian_radius.value_or(default_gaussian_radius(g))};
}

int focus_radius_of(const RunConfig& cfg, const GridSpec& g) {
  return cfg.focus.window_radius_px.value_or(default_window_radius_px(g));
}

// Holograms arrive either as 16-bit PGM counts or as a real-valued
// single-field file.
Hologram<double> load_hologram(const RunConfig& cfg, const fs::path& input) {
  require_exists(input);
  const GridSpec g = cfg.make_grid();
  if (input.extension() == ".pgm") {
    RealArrayXd counts = load_pgm16(input);
    if (counts.rows() != g.nx || counts.cols() != g.ny)
      throw DataError("hologram size does not match the configured grid: " + input.string());
    Hologram<double> h{g, std::move(counts)};
    h.validate();
    return h;
  }
  Field2D<double> f = load_field(input);
  if (f.values.imag().abs().maxCoeff() > 0.0)
    throw DataError("hologram field file has nonzero imaginary part: " + input.string());
  Hologram<double> h{f.grid, f.values.real()};
  h.validate();
  return h;
}

void save_focus_csv(const fs::path& path, const FocusScan<double>& scan) {
  std::vector<std::vector<double>> rows;
  rows.reserve(scan.z_list.size());
  for (size_t k = 0; k < scan.z_list.size(); ++k)
    rows.push_back({scan.z_list[k], scan.sigma_list[k], scan.contrast_list[k]});
  save_csv(path, {"z_um", "sigma", "contrast"}, rows);
}

void save_history_csv(const fs::path& path, const std::vector<MgdHistoryRow<double>>& history) {
  std::vector<std::vector<double>> rows;
  rows.reserve(history.size());
  for (const auto& r : history)
    rows.push_back({static_cast<double>(r.iter), r.c1, r.c2, r.theta, r.e_d, r.t});
  save_csv(path, {"iter", "c1", "c2", "theta", "e_d", "t"}, rows);
}

// Per-slice amplitude and unwrapped-phase images on a scale shared
// across the stack.
void export_volume_images(const FieldVolume<double>& u, const fs::path& out_dir,
                          const std::string& prefix) {
  const int nz = u.nz();
  double amp_max = 0.0;
  std::vector<RealArrayXd> amps(nz);
  for (int j = 0; j < nz; ++j) {
    amps[j] = u.slices[j].abs();
    amp_max = std::max(amp_max, amps[j].maxCoeff());
  }
  std::vector<RealArrayXd> phases(nz);
  double ph_min = std::numeric_limits<double>::infinity();
  double ph_max = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < nz; ++j) {
    const Field2D<double> f{u.grid, u.slices[j]};
    if (amps[j].maxCoeff() > 0.0) {
      phases[j] = unwrap_phase(f);
    } else {
      phases[j] = RealArrayXd::Zero(u.grid.nx, u.grid.ny);
    }
    ph_min = std::min(ph_min, phases[j].minCoeff());
    ph_max = std::max(ph_max, phases[j].maxCoeff());
  }
  const double amp_scale = amp_max > 0.0 ? 1.0 / amp_max : 1.0;
  const double ph_span = ph_max > ph_min ? ph_max - ph_min : 1.0;
  for (int j = 0; j < nz; ++j) {
    save_png_gray8(out_dir / (prefix + "amplitude_" + std::to_string(j) + ".png"),
                   amps[j] * amp_scale);
    RealArrayXd t = (phases[j] - ph_min) / ph_span;
    RealArrayXd r, g, b;
    diverging_colormap(t, r, g, b);
    save_png_rgb8(out_dir / (prefix + "phase_" + std::to_string(j) + ".png"), r, g, b);
  }
}

void print_energy_table(std::ostream& log, const FieldVolume<double>& u) {
  const auto e = volume_energy_profile(u);
  double total = 0.0;
  for (double x : e) total += x;
  log << "slice  z_um     energy        fraction\n";
  for (int j = 0; j < u.nz(); ++j) {
    const double frac = total > 0.0 ? e[j] / total : 0.0;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-6d %-8.3f %-13.6g %-8.5f\n", j, u.slice_z(j), e[j], frac);
    log << buf;
  }
}

}  // namespace

void cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, std::ostream& log) {
  const fs::path dir = prepared_out_dir(out_dir);
  const GridSpec g = cfg.make_grid();
  const PhantomSpec spec = cfg.make_phantom_spec(g);
  const FieldVolume<double> truth = make_phantom<double>(spec);
  ReferenceSpec ref{cfg.reference.carrier_x, cfg.reference.carrier_y, cfg.reference.amplitude};
  SimNoiseSpec noise{cfg.noise.snr_db, cfg.noise.quantize_bits, cfg.seed};
  const Hologram<double> holo = simulate_hologram(truth, ref, noise);

  save_volume(dir / "truth_volume.htf", truth);
  save_field(dir / "hologram.htf",
             Field2D<double>{g, holo.intensity.cast<std::complex<double>>()});
  const double peak = holo.intensity.maxCoeff();
  RealArrayXd counts = peak > 0.0 ? RealArrayXd((holo.intensity / peak * 65535.0).round())
                                  : RealArrayXd::Zero(g.nx, g.ny);
  save_pgm16(dir / "hologram.pgm", counts);
  log << "wrote " << (dir / "truth_volume.htf").string() << "\n";
  log << "wrote " << (dir / "hologram.htf").string() << " (exact intensity)\n";
  log << "wrote " << (dir / "hologram.pgm").string() << " (16-bit scaled view)\n";
}

void cmd_demodulate(const RunConfig& cfg, const fs::path& input, const fs::path& out_dir,
                    std::ostream& log) {
  const fs::path dir = prepared_out_dir(out_dir);
  const Hologram<double> holo = load_hologram(cfg, input);
  const Field2D<double> v = demodulate_ftm(holo, carrier_of(cfg));
  save_field(dir / "field.htf", v);
  log << "wrote " << (dir / "field.htf").string() << "\n";
}

void cmd_focus(const RunConfig& cfg, const fs::path& input, const fs::path& out_dir,
               std::ostream& log) {
  const fs::path dir = prepared_out_dir(out_dir);
  require_exists(input);
  const Field2D<double> v = load_field(input);
  const FocusScan<double> scan =
      focus_scan(v, cfg.focus.z_min, cfg.focus.z_max, cfg.focus.z_step, focus_radius_of(cfg, v.grid));
  save_focus_csv(dir / "focus.csv", scan);
  log << "z_focus = " << scan.z_focus << " um (window " << scan.window_radius_px << " px)\n";
  log << "wrote " << (dir / "focus.csv").string() << "\n";
}

void cmd_reconstruct(const RunConfig& cfg, const fs::path& input, bool input_is_field,
                     const fs::path& out_dir, std::ostream& log) {
  const fs::path dir = prepared_out_dir(out_dir);

  // Demodulate unless the input is already a complex detector field.
  Field2D<double> demodulated = [&] {
    if (input_is_field) {
      require_exists(input);
      return load_field(input);
    }
    const Hologram<double> holo = load_hologram(cfg, input);
    return demodulate_ftm(holo, carrier_of(cfg));
  }();
  const GridSpec g = demodulated.grid;
  const int radius_px = focus_radius_of(cfg, g);

  // Contrast-based stages read the raw demodulated field; the background
  // level is what makes the phase-object contrast minimum visible.
  const FocusScan<double> scan =
      focus_scan(demodulated, cfg.focus.z_min, cfg.focus.z_max, cfg.focus.z_step, radius_px);
  save_focus_csv(dir / "focus.csv", scan);
  const double z_center = cfg.box.z_center.value_or(scan.z_focus);
  const AxialBox box{cfg.box.nz, z_center};
  box.validate(g);
  log << "z_focus = " << scan.z_focus << " um; box centered at " << z_center << " um\n";

  MgdConfig<double> mgd;
  mgd.max_iters = cfg.mgd.max_iters;
  mgd.theta_stop = cfg.mgd.theta_stop;
  mgd.theta_patience = cfg.mgd.theta_patience;
  mgd.t_init = cfg.mgd.t_init.value_or(0.0);
  mgd.t_init_rel = cfg.mgd.t_init_rel;
  mgd.t_decay = cfg.mgd.t_decay;
  mgd.schedule = cfg.mgd.schedule;
  mgd.t_floor_rel = cfg.mgd.t_floor_rel;
  mgd.noise_amplitude = cfg.mgd.noise_amplitude;
  mgd.rng_seed = cfg.seed;
  if (cfg.mgd.weights) {
    mgd.weights = compute_weights(demodulated, box, radius_px);
    log << "weights:";
    for (int j = 0; j < mgd.weights->weights.size(); ++j)
      log << " " << mgd.weights->weights[j];
    log << "\n";
  }
  mgd.stall_window = cfg.mgd.stall_window.value_or(cfg.mgd.weights ? 0 : 10);

  const Field2D<double> v = subtract_background(demodulated, window_of(cfg, g));

  TvConfig<double> tv = tv_config_for<double>(g, 1.0);
  if (cfg.tv.epsilon) {
    tv.epsilon = *cfg.tv.epsilon;
  } else {
    const FieldVolume<double> probe = make_initial_guess(v, box, mgd.noise_amplitude, mgd.rng_seed);
    tv.epsilon = 1e-3 * max_abs(probe);
    if (!(tv.epsilon > 0.0)) throw NumericalError("tv: zero field; cannot scale epsilon");
  }

  const MgdState<double> st = run_mgd(v, box, tv, mgd);

  save_volume(dir / "volume.htf", st.guess);
  save_history_csv(dir / "history.csv", st.history);
  export_volume_images(st.guess, dir, "");

  const auto e = volume_energy_profile(st.guess);
  double total = 0.0;
  for (double x : e) total += x;
  const double peripheral =
      (st.guess.nz() >= 2 && total > 0.0) ? (e.front() + e.back()) / total : 0.0;

  std::ofstream summary(dir / "summary.txt", std::ios::trunc);
  auto report = [&](std::ostream& os) {
    os << "iterations          " << st.iter << "\n";
    os << "z_focus_um          " << scan.z_focus << "\n";
    os << "z_center_um         " << z_center << "\n";
    os << "c1                  " << st.c1 << "\n";
    os << "c2                  " << st.c2 << "\n";
    os << "theta_rad           " << st.theta << "\n";
    os << "e_d                 " << st.e_d << "\n";
    os << "peripheral_fraction " << peripheral << "\n";
  };
  report(summary);
  report(log);
  print_energy_table(log, st.guess);
  log << "wrote " << (dir / "volume.htf").string() << "\n";

  if (st.e_d > cfg.mgd.e_d_max)
    throw NumericalError("relative data error " + std::to_string(st.e_d) +
                         " above configured e_d_max");
}

void cmd_inspect(const RunConfig& cfg, const fs::path& input, const std::optional<SweepSpec>& sweep,
                 const fs::path& out_dir, std::ostream& log) {
  require_exists(input);
  const FieldKind kind = peek_kind(input);
  if (kind == FieldKind::volume) {
    const FieldVolume<double> u = load_volume(input);
    log << "volume " << u.grid.nx << " x " << u.grid.ny << " x " << u.nz() << ", z_center "
        << u.box.z_center << " um, norm " << norm(u) << "\n";
    print_energy_table(log, u);
    if (sweep) log << "note: back-propagation sweep applies to single-field inputs only\n";
    return;
  }
  const Field2D<double> v = load_field(input);
  log << "field " << v.grid.nx << " x " << v.grid.ny << ", norm " << norm(v.values) << "\n";
  if (!sweep) return;
  if (!(sweep->z_step > 0.0) || !(sweep->z_min < sweep->z_max))
    throw ConfigError("sweep: need z_min < z_max and z_step > 0");
  const fs::path dir = prepared_out_dir(out_dir);
  const int n = static_cast<int>(std::floor((sweep->z_max - sweep->z_min) / sweep->z_step + 1e-9)) + 1;
  RealArrayXd cut(v.grid.nx, n);  // rows of the image: one per z sample
  for (int k = 0; k < n; ++k) {
    const double z = sweep->z_min + k * sweep->z_step;
    const Field2D<double> bp = propagate(v, -z);
    cut.col(k) = bp.values.col(v.grid.ny / 2).abs();
  }
  const double peak = cut.maxCoeff();
  if (peak > 0.0) cut /= peak;
  save_png_gray8(dir / "sweep_xz.png", cut);
  log << "wrote " << (dir / "sweep_xz.png").string() << " (" << n << " rows)\n";
  (void)cfg;
}

void cmd_export(const fs::path& input, const fs::path& out_dir, std::ostream& log) {
  require_exists(input);
  const fs::path dir = prepared_out_dir(out_dir);
  if (peek_kind(input) == FieldKind::volume) {
    const FieldVolume<double> u = load_volume(input);
    export_volume_images(u, dir, "");
    log << "wrote per-slice amplitude/phase images under " << dir.string() << "\n";
    return;
  }
  const Field2D<double> v = load_field(input);
  FieldVolume<double> u{v.grid, AxialBox{1, v.grid.dz}, {v.values}};
  export_volume_images(u, dir, "");
  log << "wrote amplitude_0.png and phase_0.png under " << dir.string() << "\n";
}

}  // namespace holotomo::io
