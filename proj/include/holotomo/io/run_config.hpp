#pragma once

#include "holotomo/grid.hpp"
#include "holotomo/mgd.hpp"
#include "holotomo/phantom.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace holotomo::io {

// Plain-text sectioned key = value configuration. Unknown sections or
// keys are rejected with the offending line number; `auto` leaves a
// parameter to be resolved by the pipeline; `inf` is accepted where a
// threshold can be disabled. Repeated `cell` keys build the phantom
// scene.
struct RunConfig {
  std::uint64_t seed = 0;

  struct Grid {
    int nx = 280;
    int ny = 280;
    double pixel_pitch = 3.45;  // sensor pitch, um
    double magnification = 40.0;
    double wavelength = 0.65;
    double na = 0.75;
  } grid;

  struct Box {
    int nz = 5;
    double dz = 0.75;
    std::optional<double> z_center;  // unset: use the focus scan result
  } box;

  struct Phantom {
    double support_scale = 2.5;
    std::vector<PhantomCell> cells;  // empty: default single centered cell
  } phantom;

  struct Reference {
    double carrier_x = 2.8986;  // cycles/um
    double carrier_y = 2.8986;
    double amplitude = 2.5;
  } reference;

  struct Noise {
    double snr_db = std::numeric_limits<double>::infinity();
    int quantize_bits = 0;
  } noise;

  struct Ftm {
    std::optional<double> mask_radius;  // unset: half the carrier magnitude
  } ftm;

  struct Window {
    std::optional<double> gaussian_radius;  // unset: 40% of the half-extent
  } window;

  struct Focus {
    double z_min = 0.0;
    double z_max = 18.0;
    double z_step = 0.75;
    std::optional<int> window_radius_px;  // unset: scale the 65 px reference window
  } focus;

  struct Tv {
    std::optional<double> epsilon;  // unset: 1e-3 * max |initial guess|
  } tv;

  struct Mgd {
    int max_iters = 500;
    double theta_stop = 2.8;
    int theta_patience = 20;
    std::optional<double> t_init;  // unset: t_init_rel * norm of initial guess
    double t_init_rel = 0.01;
    double t_decay = 0.5;
    std::optional<int> stall_window;  // unset: 10 unweighted, 0 (fixed step) weighted
    StepSchedule schedule = StepSchedule::kStallWindow;
    double t_floor_rel = 1e-6;
    double noise_amplitude = 0.01;
    bool weights = true;
    double e_d_max = std::numeric_limits<double>::infinity();
  } mgd;

  GridSpec make_grid() const;
  PhantomSpec make_phantom_spec(const GridSpec& g) const;

  static RunConfig parse_string(const std::string& text, const std::string& name);
  static RunConfig parse_file(const std::filesystem::path& path);
};

}  // namespace holotomo::io
